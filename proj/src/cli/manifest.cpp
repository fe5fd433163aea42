#include "adsl/cli/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adsl/vm/reference.hpp"

namespace adsl::cli {

namespace fs = std::filesystem;

const std::vector<std::string>& categories() {
    static const std::vector<std::string> c = {"Activation",    "Loss",      "Math",   "Normalization",
                                               "Optimizer",     "Reduce",    "Pooling"};
    return c;
}

vm::Tolerance FixtureManifest::tolerance(dsl::DType t) const {
    auto it = tolerances.find(t);
    return it != tolerances.end() ? it->second : vm::default_tolerance(t);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + p.string());
}

FixtureManifest load_manifest(const fs::path& manifest_path) {
    const std::string where = manifest_path.string();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    auto fail = [&](const std::string& msg) { throw std::runtime_error(where + ": " + msg); };
    FixtureManifest m;
    m.dir = manifest_path.parent_path();
    try {
        m.name = j.at("name").get<std::string>();
        m.category = j.at("category").get<std::string>();
        m.oracle = j.at("oracle").get<std::string>();
        for (const auto& s : j.at("shapes")) m.shapes.push_back(s.get<semantic::ShapeMap>());
        if (j.contains("tolerances")) {
            for (const auto& [k, v] : j.at("tolerances").items()) {
                auto dt = dsl::parse_dtype(k);
                if (!dt) fail("unknown dtype '" + k + "' in tolerances");
                m.tolerances[*dt] = vm::Tolerance{v.at("rel").get<double>(), v.at("abs").get<double>()};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    }
    const auto& cats = categories();
    if (std::find(cats.begin(), cats.end(), m.category) == cats.end()) fail("unknown category '" + m.category + "'");
    if (!vm::find_operator(m.oracle)) fail("unknown oracle '" + m.oracle + "'");
    if (m.shapes.empty()) fail("no shapes");
    if (!fs::is_regular_file(m.program_path())) fail("missing " + m.program_path().string());
    return m;
}

std::vector<FixtureManifest> load_corpus(const fs::path& fixtures_dir) {
    if (!fs::is_directory(fixtures_dir)) throw std::runtime_error("not a directory: " + fixtures_dir.string());
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(fixtures_dir)) {
        if (e.is_directory() && fs::is_regular_file(e.path() / "manifest.json")) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<FixtureManifest> out;
    for (const auto& d : dirs) out.push_back(load_manifest(d / "manifest.json"));
    return out;
}

}  // namespace adsl::cli
