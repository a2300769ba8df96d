// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "speccalc/core.hpp"

namespace speccalc {

/// Parsed arithmetic expression in the variable z.
///
/// Grammar: + - * / ^, parentheses, numbers, the constants i and pi, and the
/// functions log, exp, sqrt, sin, cos and upper(u, l). Integer powers are
/// exact products; other powers use the principal branch exp(p log z).
/// upper(u, l) is u when Im z > 0 and l otherwise. Juxtaposition such as
/// 2z multiplies.
class Expression {
public:
  struct Node;

  static Expression parse(const std::string& text);

  Complex operator()(Complex z) const;
  const std::string& text() const { return text_; }

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace speccalc
