#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbss/errors.hpp"
#include "hbss/hbss.hpp"
#include "hbss/tower.hpp"

namespace hbss {

/// Problem description, kept as text where the engine parses it later so
/// that printing is lossless.
struct ProblemSpec {
  struct RingSection {
    /// "Z_(p)", "F_p" or "Z/p^k".
    std::string coefficients = "Z_(p)";
    long prime = 2;
    /// k for Z/p^k.
    int exponent = 1;
    std::vector<RingGenerator> generators;
  };
  struct InputSection {
    /// "comodule" or "presentation".
    std::string mode = "comodule";
    // comodule: a module over the residue ring L with operators Q_j.
    std::vector<ModuleGenerator> basis;
    /// operators[j] = list of (basis name, image expression).
    std::vector<std::vector<std::pair<std::string, std::string>>> operators;
    std::vector<std::string> comodule_relations;
    /// Optional presentation T/(f) used for the abutment in comodule mode.
    std::vector<std::string> abutment_relations;
    // presentation: T/(relations) on one generator.
    int generator_degree = 0;
    std::vector<std::string> relations;
  };
  struct OutputSection {
    std::vector<std::string> formats{"json"};
    std::string path = ".";
  };

  RingSection ring;
  std::vector<std::string> sequence;
  InputSection input;
  Window window{0, 0, 1, 2};
  OutputSection output;

  bool operator==(const ProblemSpec& other) const;
};

/// Line-oriented `[section]` / `key = value` text. Throws SyntaxError at the
/// first malformed line and ValidationError listing every located problem.
ProblemSpec parse_spec(const std::string& text);
/// Canonical text; parse_spec(print_spec(s)) == s.
std::string print_spec(const ProblemSpec& spec);

std::vector<std::string> preset_names();
/// Throws ValidationError for unknown names.
std::string preset_text(const std::string& name);

struct PhaseTiming {
  std::string phase;
  double seconds = 0;
};

struct RunReport {
  ProblemSpec spec;
  std::vector<Page> pages;
  std::optional<Abutment> abutment;
  std::optional<AbutmentReport> comparison;
  RegularityReport regularity;
  std::optional<ComoduleCertificate> comodule;
  ParityCertificate parity;
  /// Stage short exact sequences of both towers on the window.
  bool towers_exact = false;
  int tower_checks = 0;
  std::vector<TurnCheck> turn_checks;
  std::vector<LinearityObservation> linearity;
  std::vector<PhaseTiming> timings;
};

/// An engine error tagged with the phase it came from.
class PhaseError : public Error {
 public:
  PhaseError(std::string phase, const std::string& message, int exit_code)
      : Error(phase + ": " + message), phase_(std::move(phase)), exit_code_(exit_code) {}
  const std::string& phase() const { return phase_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string phase_;
  int exit_code_;
};

/// 2 for input problems (syntax, validation, window), 3 for certified
/// mathematical failures, 4 for I/O, 1 otherwise.
int exit_code_for(const std::exception& e);

/// regularity -> towers -> spectral sequence -> abutment comparison.
/// Errors are rethrown as PhaseError.
RunReport run(const ProblemSpec& spec);

/// What the JSON carries about a page.
struct PageRecord {
  struct CellRecord {
    int s = 0;
    int t = 0;
    int free_rank = 0;
    std::vector<int> torsion;
    bool masked = false;
    bool operator==(const CellRecord& o) const {
      return s == o.s && t == o.t && free_rank == o.free_rank && torsion == o.torsion && masked == o.masked;
    }
  };
  struct DifferentialRecord {
    Bidegree from;
    Bidegree to;
    std::vector<std::vector<std::string>> matrix;
    bool operator==(const DifferentialRecord& o) const {
      return from == o.from && to == o.to && matrix == o.matrix;
    }
  };
  int r = 1;
  std::vector<CellRecord> cells;
  std::vector<DifferentialRecord> differentials;
  bool operator==(const PageRecord& o) const {
    return r == o.r && cells == o.cells && differentials == o.differentials;
  }
};

/// Nonzero or masked cells, and every stored differential.
PageRecord page_record(const Page& page);
std::string to_json(const RunReport& report);
/// Pages of a JSON document written by to_json.
std::vector<PageRecord> read_pages_json(const std::string& text);

/// Fixed-width chart per page: rows s (top = largest), columns t; "." is zero
/// and "?" is masked.
std::string to_table(const RunReport& report);
std::string page_table(const Page& page);
/// Static chart: one circle.cell per JSON cell, lines for nonzero d_r,
/// shaded masked cells.
std::string page_svg(const Page& page);

/// Writes the requested formats into `directory`; returns the paths written.
std::vector<std::string> emit(const RunReport& report, const std::vector<std::string>& formats,
                              const std::string& directory);

}  // namespace hbss
