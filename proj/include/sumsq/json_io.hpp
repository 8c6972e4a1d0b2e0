#pragma once

#include <string>
#include <vector>

#include "sumsq/program.hpp"

namespace sumsq {

// Writes the program's stored state as pretty-printed JSON with a
// trailing newline. Field order is fixed, so equal programs produce
// byte-identical text and serialize(parse(s)) == s.
std::string serialize_program(const SosProgram& prog);

// Rebuilds a program from serialize_program output. Structural
// problems raise parse errors whose messages point at the offending
// element ("/constraints/2/rhs/0: ..."); semantic violations surface
// as invalid_argument errors from SosProgram::from_parts. Unknown
// fields are skipped; when `warnings` is given each one is reported
// there.
SosProgram parse_program(const std::string& text,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace sumsq
