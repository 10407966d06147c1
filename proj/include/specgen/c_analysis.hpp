#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "specgen/c_lexer.hpp"

namespace specgen {

/// Token indices of a function definition at file scope.
struct FunctionDef {
    std::string name;
    std::size_t first{0};  // first declaration-specifier token
    std::size_t name_index{0};
    std::size_t body_open{0};
    std::size_t body_close{0};  // npos when the body never closes
};

[[nodiscard]] std::vector<FunctionDef> find_function_definitions(const TokenStream& tokens);

struct FileScopeVariable {
    std::string name;
    std::size_t line{0};
    bool is_mutable{true};
};

/// Names a translation unit (or fragment) declares at file scope.
struct Declarations {
    std::set<std::string> typedef_names;
    std::set<std::string> object_macros;
    std::set<std::string> function_macros;
    std::set<std::string> enum_constants;
    std::set<std::string> void_functions;
    std::set<std::string> non_void_functions;
    std::vector<FileScopeVariable> variables;

    void merge(const Declarations& other);
    [[nodiscard]] bool is_type_name(const std::string& name) const { return typedef_names.contains(name); }
    [[nodiscard]] bool is_constant(const std::string& name) const {
        return object_macros.contains(name) || enum_constants.contains(name);
    }
};

[[nodiscard]] Declarations collect_declarations(const TokenStream& tokens);

/// File-scope names (from `globals`) that the body of `def` writes: assignment
/// targets, increments, and `&name` arguments to calls.
[[nodiscard]] std::set<std::string> written_globals(const TokenStream& tokens, const FunctionDef& def,
                                                    const std::set<std::string>& globals);

} // namespace specgen
