#pragma once

#include <string>

#include "occnum/errors.hpp"
#include "occnum/model.hpp"

namespace occnum {

// Line-oriented `.occ` model format, '#' starts a comment:
//
//   model <ident>
//   mode <ident>
//   omega <mode> <real>
//   jump <real> * <factor> [<factor> ...]
//
// with factor := create(<mode>[,<int>]) | destroy(<mode>[,<int>]); the
// exponent defaults to 1. The jump coefficient is the monomial coefficient
// lambda (the transition rate is 2*lambda^2 times occupation factors).
//
// Throws ParseError with a 1-based line/column on any malformed input;
// validation failures are reported at the offending jump's line.
ModelSpec parse_model(const std::string& text);

// Canonical serialization: modes in index order, jumps in declaration order,
// coefficients printed with 17 significant digits. parse(serialize(s)) is
// structurally equal to s.
std::string serialize_model(const ModelSpec& spec);

}  // namespace occnum
