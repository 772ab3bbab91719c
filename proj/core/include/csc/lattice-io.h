// core/include/csc/lattice-io.h

// Copyright 2026  css-curate authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CSC_LATTICE_IO_H_
#define CSC_LATTICE_IO_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csc/lattice.h"

namespace csc {

// Text lattice interchange, one lattice per blank-line-terminated block:
//
//   UTT <utterance-id>
//   N <id> <time>            (first N line is the start node)
//   A <src> <dst> <label> <acoustic-cost> <graph-cost>
//   F <id> <final-cost>
//
// Times and costs are decimal with up to 6 fractional digits.

// Reads the next block; std::nullopt at end of stream.  `lineno` is advanced
// and used in error messages.
std::optional<Lattice> ReadLatticeBlock(std::istream& in,
                                        const std::string& filename,
                                        int* lineno);
std::vector<Lattice> ReadLattices(std::istream& in,
                                  const std::string& filename);
// Reads all lattices and checks utterance ids are unique.
std::vector<Lattice> ReadLatticeFile(const std::string& path);

void WriteLattice(const Lattice& lattice, std::ostream& out);
void WriteLattices(const std::vector<Lattice>& lattices, std::ostream& out);
void WriteLatticeFile(const std::vector<Lattice>& lattices,
                      const std::string& path);

}  // namespace csc

#endif  // CSC_LATTICE_IO_H_
