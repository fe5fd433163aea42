#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adsl/dsl/ast.hpp"
#include "adsl/semantic/host_eval.hpp"
#include "adsl/vm/compare.hpp"

namespace adsl::cli {

/// The operator categories every fixture belongs to.
const std::vector<std::string>& categories();

/// fixtures/<name>/manifest.json next to program.adsl.
struct FixtureManifest {
    std::string name;
    std::string category;
    std::vector<semantic::ShapeMap> shapes;
    std::map<dsl::DType, vm::Tolerance> tolerances;
    std::string oracle;
    std::filesystem::path dir;

    std::filesystem::path program_path() const { return dir / "program.adsl"; }
    /// Manifest value for `t`, else the default for that dtype.
    vm::Tolerance tolerance(dsl::DType t) const;
};

/// Parses and validates one manifest (known category and oracle, program
/// file present, at least one shape). Throws std::runtime_error.
FixtureManifest load_manifest(const std::filesystem::path& manifest_path);

/// Manifests of every subdirectory of `fixtures_dir` that has one, sorted
/// by directory name.
std::vector<FixtureManifest> load_corpus(const std::filesystem::path& fixtures_dir);

/// Whole file as bytes; throws std::runtime_error when unreadable.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);

}  // namespace adsl::cli
