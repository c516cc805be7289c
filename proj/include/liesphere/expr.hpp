#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "liesphere/field.hpp"
#include "liesphere/taylor.hpp"

namespace liesphere {

/// Tiny arithmetic expression language for CLI-supplied fields and profiles.
/// Grammar: + - * / ^ (right-assoc power), unary minus, parentheses,
/// functions exp, ln/log, sin, cos, sqrt, sinh, cosh, tanh, const.
/// Variables are resolved by name at evaluation time.
class Expr {
public:
    static Expr parse(const std::string& text);

    double eval(const std::map<std::string, double>& vars) const;
    T2 eval2(const std::map<std::string, T2>& vars) const;

    /// Field over (R1, R2); `names` gives the variable names bound to the
    /// two coordinates (first entry binds R1 aliases etc.).
    Field2 as_field(const std::vector<std::string>& names = {"R1", "R2"}) const;

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

private:
    explicit Expr(NodePtr root) : root_(std::move(root)) {}
    NodePtr root_;
};

} // namespace liesphere
