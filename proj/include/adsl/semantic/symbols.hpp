#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"

namespace adsl::semantic {

enum class SymbolKind {
    TensorParam,   // host tensor parameter
    ShapeDim,      // symbolic dimension bound by an input tensor
    TilingParam,
    Builtin,       // CORES on the host; block_idx, block_start, ... in the kernel
    KernelTensor,  // kernel parameter bound to a tensor launch argument
    KernelScalar,  // kernel parameter bound to a scalar launch argument
    Buffer,
    LoopVar,
    LetScalar,
};

std::string_view symbol_kind_name(SymbolKind k);

struct Symbol {
    std::string name;
    SymbolKind kind;
    bool in_kernel = false;
    Span span;
};

struct SymbolTable {
    std::vector<Symbol> entries;

    const Symbol* find_host(std::string_view name) const;
    const Symbol* find_kernel_global(std::string_view name) const;  // params, buffers, builtins
    std::size_t count(SymbolKind k) const;
};

inline constexpr std::string_view kHostCores = "CORES";
inline constexpr std::string_view kKernelBuiltins[] = {"block_idx", "block_start", "block_len", "num_blocks"};

/// Binds every identifier use to a declaration and checks primitive
/// arity, operand kinds, memory spaces and dtypes.
Outcome<SymbolTable> resolve_symbols(const dsl::Program& p);

/// Kernel parameter i is a tensor iff launch argument i is a bare name of a
/// host tensor parameter.
bool kernel_param_is_tensor(const dsl::Program& p, std::size_t i);

}  // namespace adsl::semantic
