#pragma once

#include <map>
#include <string>
#include <vector>

#include "feedergen/nn/tape.hpp"

namespace feedergen::nn {

// Versioned textual checkpoint. Layout (documented here, asserted by tests):
//
//   feedergen-checkpoint v1
//   meta <key> <value to end of line>
//   param <name> <rows> <cols>
//   <rows*cols hexfloat values, whitespace separated>
//   rms <name> <rows> <cols>
//   <rows*cols hexfloat values>
//   ...
//
// Values are written as C hexfloats ("%a"), so doubles round-trip bit-exactly
// and resumed runs continue on the precise parameter state. Each param block
// is followed by its RMSProp accumulator block of the same shape. Loading
// binds blocks to params by name and validates shapes.
struct Checkpoint {
  std::map<std::string, std::string> meta;

  void save(const std::string& path, const std::vector<const Param*>& params) const;

  // Fills the named params in place. Every param must be present in the file
  // with matching shape; unknown names in the file are an error too.
  void load(const std::string& path, const std::vector<Param*>& params);
};

}  // namespace feedergen::nn
