#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dnnrelax/bench.hpp"
#include "dnnrelax/equivalence.hpp"
#include "dnnrelax/model.hpp"
#include "dnnrelax/relax.hpp"
#include "dnnrelax/solver.hpp"

namespace dnnrelax {

/// Malformed content (bad JSON, wrong shapes, asymmetric Q, duplicate edges).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing or unwritable file.
class FileError : public std::runtime_error {
 public:
  explicit FileError(const std::string& what) : std::runtime_error(what) {}
};

/// {"name", "n", "m", "Q": n*n row-major, "c": n, "A": m*n row-major, "b": m}.
/// Q and A may also be given as nested row arrays. Q must be exactly symmetric.
BqpInstance instance_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json instance_to_json(const BqpInstance& inst);
BqpInstance load_instance(const std::string& path);
void save_instance(const BqpInstance& inst, const std::string& path);

/// First line n, then one "i j w" line per edge with 1-based nodes. Blank lines
/// and lines starting with '#' are skipped.
MaxCutGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const MaxCutGraph& g);
MaxCutGraph load_graph(const std::string& path);
void save_graph(const MaxCutGraph& g, const std::string& path);

/// Debug dump; the "format" field carries a version number.
nlohmann::ordered_json program_to_json(const ConicProgram& prog);

nlohmann::ordered_json report_to_json(const EquivalenceReport& rep);
nlohmann::ordered_json record_to_json(const RunRecord& rec);

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
nlohmann::ordered_json number_or_string(double v);

}  // namespace dnnrelax
