// core/src/lattice-io.cc

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

#include "csc/lattice-io.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace csc {

namespace {

int32 MapNode(const std::map<int32, int32>& ids, int32 id,
              const std::string& where) {
  auto it = ids.find(id);
  if (it == ids.end()) {
    throw DataError(StrCat(where, ": unknown node id ", id));
  }
  return it->second;
}

}  // namespace

std::optional<Lattice> ReadLatticeBlock(std::istream& in,
                                        const std::string& filename,
                                        int* lineno) {
  std::string line;
  Lattice lattice;
  std::map<int32, int32> ids;
  bool started = false;
  while (std::getline(in, line)) {
    ++*lineno;
    std::string where = StrCat(filename, ":", *lineno);
    if (line.empty()) {
      if (started) break;
      continue;  // leading blank lines
    }
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) {
      if (started) break;
      continue;
    }
    const std::string& tag = fields[0];
    if (tag == "UTT") {
      if (started) {
        throw DataError(StrCat(where, ": UTT inside a lattice block"));
      }
      if (fields.size() != 2) {
        throw DataError(StrCat(where, ": UTT needs an utterance id"));
      }
      lattice.utterance_id = fields[1];
      started = true;
    } else if (tag == "N") {
      if (!started) throw DataError(StrCat(where, ": N before UTT"));
      if (fields.size() != 3) {
        throw DataError(StrCat(where, ": N needs <id> <time>"));
      }
      int32 id = static_cast<int32>(ParseInt(fields[1], where + " node id"));
      if (ids.count(id)) {
        throw DataError(StrCat(where, ": duplicate node id ", id));
      }
      double time = ParseDouble(fields[2], where + " node time");
      ids[id] = static_cast<int32>(lattice.nodes.size());
      lattice.nodes.push_back(LatticeNode{id, time});
    } else if (tag == "A") {
      if (!started) throw DataError(StrCat(where, ": A before UTT"));
      if (fields.size() != 6) {
        throw DataError(
            StrCat(where, ": A needs <src> <dst> <label> <ac> <gc>"));
      }
      int32 src = MapNode(
          ids, static_cast<int32>(ParseInt(fields[1], where + " src")), where);
      int32 dst = MapNode(
          ids, static_cast<int32>(ParseInt(fields[2], where + " dst")), where);
      double ac = ParseDouble(fields[4], where + " acoustic cost");
      double gc = ParseDouble(fields[5], where + " graph cost");
      lattice.AddArc(src, dst, fields[3], ac, gc);
    } else if (tag == "F") {
      if (!started) throw DataError(StrCat(where, ": F before UTT"));
      if (fields.size() != 3) {
        throw DataError(StrCat(where, ": F needs <id> <final-cost>"));
      }
      int32 node = MapNode(
          ids, static_cast<int32>(ParseInt(fields[1], where + " node")), where);
      double cost = ParseDouble(fields[2], where + " final cost");
      lattice.SetFinal(node, cost);
    } else {
      throw DataError(StrCat(where, ": unknown record tag '", tag, "'"));
    }
  }
  if (!started) return std::nullopt;
  if (lattice.utterance_id.empty()) {
    throw DataError(StrCat(filename, ": lattice block without utterance id"));
  }
  lattice.start = 0;  // first N line
  try {
    lattice.Validate();
  } catch (const DataError& e) {
    throw DataError(
        StrCat(filename, ": lattice ", lattice.utterance_id, ": ", e.what()));
  }
  return lattice;
}

std::vector<Lattice> ReadLattices(std::istream& in,
                                  const std::string& filename) {
  std::vector<Lattice> lattices;
  int lineno = 0;
  while (auto lattice = ReadLatticeBlock(in, filename, &lineno)) {
    lattices.push_back(std::move(*lattice));
  }
  return lattices;
}

std::vector<Lattice> ReadLatticeFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open lattice file ", path));
  std::vector<Lattice> lattices = ReadLattices(in, path);
  std::set<std::string> seen;
  for (const Lattice& lattice : lattices) {
    if (!seen.insert(lattice.utterance_id).second) {
      throw DataError(
          StrCat(path, ": duplicate utterance id ", lattice.utterance_id));
    }
  }
  return lattices;
}

void WriteLattice(const Lattice& lattice, std::ostream& out) {
  for (const LatticeNode& node : lattice.nodes) {
    if (!std::isfinite(node.time)) {
      throw DataError(StrCat("lattice ", lattice.utterance_id,
                             ": non-finite node time"));
    }
  }
  for (const LatticeArc& arc : lattice.arcs) {
    if (!std::isfinite(arc.acoustic_cost) || !std::isfinite(arc.graph_cost)) {
      throw DataError(
          StrCat("lattice ", lattice.utterance_id, ": non-finite arc cost"));
    }
  }
  out << "UTT " << lattice.utterance_id << '\n';
  auto write_node = [&](int32 v) {
    out << "N " << lattice.nodes[v].id << ' '
        << FormatFixedTrim(lattice.nodes[v].time, 6) << '\n';
  };
  write_node(lattice.start);
  for (int32 v = 0; v < static_cast<int32>(lattice.nodes.size()); ++v) {
    if (v != lattice.start) write_node(v);
  }
  for (const LatticeArc& arc : lattice.arcs) {
    out << "A " << lattice.nodes[arc.src].id << ' ' << lattice.nodes[arc.dst].id
        << ' ' << arc.label << ' ' << FormatFixedTrim(arc.acoustic_cost, 6)
        << ' ' << FormatFixedTrim(arc.graph_cost, 6) << '\n';
  }
  for (const LatticeFinal& f : lattice.finals) {
    if (!std::isfinite(f.cost)) {
      throw DataError(
          StrCat("lattice ", lattice.utterance_id, ": non-finite final cost"));
    }
    out << "F " << lattice.nodes[f.node].id << ' '
        << FormatFixedTrim(f.cost, 6) << '\n';
  }
  out << '\n';
}

void WriteLattices(const std::vector<Lattice>& lattices, std::ostream& out) {
  for (const Lattice& lattice : lattices) WriteLattice(lattice, out);
}

void WriteLatticeFile(const std::vector<Lattice>& lattices,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(StrCat("cannot write lattice file ", path));
  WriteLattices(lattices, out);
}

}  // namespace csc
