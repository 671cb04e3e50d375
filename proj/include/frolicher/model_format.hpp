#pragma once

#include <string>

#include "frolicher/models.hpp"

namespace frolicher {

/// Parses the structure-equation text format.
///
/// One declaration per line ('#' starts a comment):
///   n = <int>                      complex dimension (1..9)
///   family t in disc(<radius>)     switches to family mode
///   d<i> = 0 | <term> ((+|-) <term>)*
///
/// A term is an optional coefficient-factor product followed by a wedge
/// monomial of two indices, each with a trailing ' for a barred index:
///   -12            -phi^1 ^ phi^2
///   +1'2'          +phibar^1 ^ phibar^2
///   t*12'          t * phi^1 ^ phibar^2          (family mode)
///   (0.5+0.25i)*11' complex literals with two parts are parenthesised
/// Coefficient factors are separated by '*': real or imaginary literals
/// (2, -0.5, 1.5i, i), parenthesised a+bi literals, and in family mode
/// t, tbar, t^<k>, tbar^<k>.
CatalogEntry parse_model_text(const std::string& text);

CatalogEntry parse_model_file(const std::string& path);

/// Canonical one-line serialisation (used for the report model hash).
std::string canonical_spec(const StructureSpec& spec);
std::string canonical_spec(const FamilySpec& fam);

}  // namespace frolicher
