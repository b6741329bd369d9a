#include "hbss/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cli_internal.hpp"
#include "hbss/errors.hpp"
#include "json.hpp"

namespace hbss {

namespace {

using Json = nlohmann::ordered_json;

template <class T>
bool is(const std::exception& e) {
  return dynamic_cast<const T*>(&e) != nullptr;
}

template <class F>
auto timed(RunReport& report, const std::string& phase, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.timings.push_back(PhaseTiming{phase, elapsed.count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto value = fn();
      record();
      return value;
    }
  } catch (const PhaseError&) {
    throw;
  } catch (const Error& e) {
    throw PhaseError(phase, e.what(), exit_code_for(e));
  }
}

std::string torsion_label(int k) { return "p^" + std::to_string(k); }

int torsion_exponent(const std::string& label) {
  if (label.rfind("p^", 0) != 0) throw ValidationError("torsion entries look like p^k, got '" + label + "'");
  return std::stoi(label.substr(2));
}

Json shape_json(const ModuleShape& shape) {
  Json torsion = Json::array();
  for (int k : shape.torsion) torsion.push_back(torsion_label(k));
  return Json{{"free_rank", shape.free_rank}, {"torsion", torsion}};
}

Json page_json(const PageRecord& page) {
  Json cells = Json::array();
  for (const auto& c : page.cells) {
    Json torsion = Json::array();
    for (int k : c.torsion) torsion.push_back(torsion_label(k));
    cells.push_back(
        Json{{"s", c.s}, {"t", c.t}, {"free_rank", c.free_rank}, {"torsion", torsion}, {"masked", c.masked}});
  }
  Json diffs = Json::array();
  for (const auto& d : page.differentials)
    diffs.push_back(Json{{"from", {d.from.first, d.from.second}}, {"to", {d.to.first, d.to.second}}, {"matrix", d.matrix}});
  return Json{{"r", page.r}, {"cells", cells}, {"differentials", diffs}};
}

Json bidegree_json(const std::optional<Bidegree>& b) {
  if (!b) return nullptr;
  return Json{b->first, b->second};
}

// Compact cell text: "2", "p^2", "1+p^1"; "." for zero.
std::string compact(const ModuleShape& shape) {
  if (shape.is_zero()) return ".";
  std::vector<std::string> parts;
  if (shape.free_rank > 0) parts.push_back(std::to_string(shape.free_rank));
  for (int k : shape.torsion) parts.push_back(torsion_label(k));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + parts[i];
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* phase = dynamic_cast<const PhaseError*>(&e)) return phase->exit_code();
  if (is<SyntaxError>(e) || is<ValidationError>(e) || is<WindowTooSmall>(e)) return 2;
  if (is<NonRegular>(e) || is<NonSquareZero>(e) || is<NotFreeError>(e) || is<MembershipError>(e)) return 3;
  if (is<IoError>(e)) return 4;
  return 1;
}

RunReport run(const ProblemSpec& spec) {
  RunReport report;
  report.spec = spec;
  const detail::Problem problem = timed(report, "input", [&] { return detail::materialize(spec, nullptr); });
  const RegularSequence& seq = *problem.sequence;
  const Window& window = problem.window;

  timed(report, "regularity", [&] {
    const GradedModule t = GradedModule::cyclic(seq.ring(), {}, truncation_cap(seq, window.max_filtration));
    report.regularity = regularity_check(t, seq, window);
    if (!report.regularity.regular) throw NonRegular("sequence: " + report.regularity.summary());
    if (problem.comodule) {
      report.comodule = validate_comodule(*problem.comodule, window);
      if (!report.comodule->valid) throw ValidationError("comodule: " + report.comodule->summary());
    }
  });

  timed(report, "towers", [&] {
    const Towers towers = build_towers(seq, window);
    report.towers_exact = towers.all_exact;
    report.tower_checks = static_cast<int>(towers.ses.size());
  });

  timed(report, "spectral sequence", [&] {
    if (problem.comodule) {
      // Only d_1 is known from the comodule; later pages need a collapse.
      report.pages.push_back(e1_from_comodule(seq, *problem.comodule, window));
      if (window.max_page >= 2) report.pages.push_back(turn_page(report.pages.back()));
    } else {
      FilteredResult result = filtered_ss(*problem.module, seq, window);
      report.pages = std::move(result.pages);
      report.abutment = std::move(result.abutment);
      report.turn_checks = std::move(result.turn_checks);
      report.linearity = std::move(result.linearity);
    }
    report.parity = parity_collapse_check(report.pages.back());
    if (report.parity.collapsed) report.pages.back().permanent = true;
  });

  timed(report, "abutment", [&] {
    if (problem.abutment_module) report.abutment = filtered_abutment(*problem.abutment_module, seq, window);
    if (report.abutment) report.comparison = abutment_compare(report.pages, *report.abutment);
  });
  return report;
}

PageRecord page_record(const Page& page) {
  PageRecord out;
  out.r = page.r;
  for (const auto& [key, cell] : page.cells) {
    if (cell.shape.is_zero() && !cell.masked) continue;
    out.cells.push_back(PageRecord::CellRecord{key.first, key.second, cell.shape.free_rank, cell.shape.torsion, cell.masked});
  }
  for (const auto& d : page.differentials) {
    PageRecord::DifferentialRecord rec{d.from, d.to, {}};
    for (int i = 0; i < d.matrix.rows(); ++i) {
      std::vector<std::string> row;
      for (int j = 0; j < d.matrix.cols(); ++j) row.push_back(d.matrix.at(i, j).get_str());
      rec.matrix.push_back(std::move(row));
    }
    out.differentials.push_back(std::move(rec));
  }
  return out;
}

std::string to_json(const RunReport& report) {
  Json pages = Json::array();
  for (const auto& page : report.pages) pages.push_back(page_json(page_record(page)));

  Json abutment = nullptr;
  if (report.abutment) {
    const Abutment& a = *report.abutment;
    Json graded = Json::array();
    for (const auto& [key, shape] : a.graded) {
      if (shape.is_zero()) continue;
      Json cell{{"s", key.first}, {"t", key.second}};
      cell.update(shape_json(shape));
      auto st = a.stable.find(key);
      cell["stable"] = st != a.stable.end() && st->second;
      graded.push_back(cell);
    }
    Json total = Json::array();
    for (const auto& [t, shape] : a.total) {
      if (shape.is_zero()) continue;
      Json cell{{"t", t}};
      cell.update(shape_json(shape));
      total.push_back(cell);
    }
    abutment = Json{{"label", a.label}, {"truncation", a.truncation}, {"ground", a.ground.describe()},
                    {"consistent", a.consistent}, {"graded", graded}, {"total", total}};
  }

  Json certificates = Json::object();
  certificates["regularity"] = Json{{"regular", report.regularity.regular},
                                    {"via_polynomial_cover", report.regularity.via_polynomial_cover},
                                    {"summary", report.regularity.summary()}};
  if (report.comodule)
    certificates["comodule"] = Json{{"valid", report.comodule->valid},
                                    {"violations", report.comodule->violations.size()},
                                    {"summary", report.comodule->summary()}};
  else
    certificates["comodule"] = nullptr;
  certificates["towers"] = Json{{"exact", report.towers_exact}, {"checks", report.tower_checks}};
  certificates["parity_collapse"] =
      Json{{"page", report.pages.empty() ? 0 : report.pages.back().r},
           {"collapsed", report.parity.collapsed},
           {"checked", report.parity.checked},
           {"odd_cell", bidegree_json(report.parity.odd_cell)}};
  if (report.comparison) {
    Json discrepancies = Json::array();
    for (const auto& d : report.comparison->discrepancies) {
      Json rec{{"s", d.s}, {"t", d.t}};
      rec["page"] = shape_json(d.page);
      rec["abutment"] = shape_json(d.abutment);
      discrepancies.push_back(rec);
    }
    certificates["abutment_compare"] = Json{{"matches", report.comparison->matches},
                                            {"last_page_stable", report.comparison->last_page_stable},
                                            {"compared", report.comparison->compared},
                                            {"masked_excluded", report.comparison->masked_excluded},
                                            {"unstable_excluded", report.comparison->unstable_excluded},
                                            {"discrepancies", discrepancies}};
  } else {
    certificates["abutment_compare"] = nullptr;
  }
  Json turns = Json::array();
  for (const auto& c : report.turn_checks)
    turns.push_back(Json{{"r", c.r}, {"compared", c.compared}, {"mismatches", c.mismatches}});
  certificates["turn_checks"] = turns;
  Json linear = Json::array();
  for (const auto& l : report.linearity)
    linear.push_back(
        Json{{"r", l.r}, {"checks", l.checks}, {"linear", l.linear}, {"first_failure", l.first_failure}});
  certificates["linearity"] = linear;
  Json masks = Json::array();
  for (const auto& page : report.pages)
    masks.push_back(Json{{"r", page.r}, {"cells", page.cells.size()}, {"masked", page.masked_count()}});
  certificates["mask_statistics"] = masks;

  Json doc{{"pages", pages}, {"abutment", abutment}, {"certificates", certificates}};
  return doc.dump(2) + "\n";
}

std::vector<PageRecord> read_pages_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(e.what(), 0, static_cast<int>(e.byte));
  }
  std::vector<PageRecord> out;
  try {
    for (const auto& page : doc.at("pages")) {
      PageRecord rec;
      rec.r = page.at("r").get<int>();
      for (const auto& c : page.at("cells")) {
        PageRecord::CellRecord cell;
        cell.s = c.at("s").get<int>();
        cell.t = c.at("t").get<int>();
        cell.free_rank = c.at("free_rank").get<int>();
        for (const auto& k : c.at("torsion")) cell.torsion.push_back(torsion_exponent(k.get<std::string>()));
        cell.masked = c.at("masked").get<bool>();
        rec.cells.push_back(std::move(cell));
      }
      for (const auto& d : page.at("differentials")) {
        PageRecord::DifferentialRecord diff;
        diff.from = {d.at("from").at(0).get<int>(), d.at("from").at(1).get<int>()};
        diff.to = {d.at("to").at(0).get<int>(), d.at("to").at(1).get<int>()};
        diff.matrix = d.at("matrix").get<std::vector<std::vector<std::string>>>();
        rec.differentials.push_back(std::move(diff));
      }
      out.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed page document: ") + e.what());
  }
  return out;
}

std::string page_table(const Page& page) {
  std::ostringstream out;
  out << "E_" << page.r << " over " << page.ground.describe() << " (rows s, columns t; . zero, ? masked)";
  if (page.permanent) out << ", permanent";
  out << "\n";
  std::vector<std::vector<std::string>> grid;
  std::size_t width = 1;
  for (int s = page.s_max; s >= page.s_min; --s) {
    std::vector<std::string> row;
    for (int t = page.t_min; t <= page.t_max; ++t) {
      const Cell* c = page.cell(s, t);
      std::string text = c == nullptr ? "." : c->masked ? "?" : compact(c->shape);
      width = std::max(width, text.size());
      row.push_back(std::move(text));
    }
    grid.push_back(std::move(row));
  }
  for (int t = page.t_min; t <= page.t_max; ++t) width = std::max(width, std::to_string(t).size());
  const int label = 5;
  out << std::setw(label) << "s\\t";
  for (int t = page.t_min; t <= page.t_max; ++t) out << ' ' << std::setw(static_cast<int>(width)) << t;
  out << "\n";
  int s = page.s_max;
  for (const auto& row : grid) {
    out << std::setw(label) << s--;
    for (const auto& text : row) out << ' ' << std::setw(static_cast<int>(width)) << text;
    out << "\n";
  }
  return out.str();
}

std::string to_table(const RunReport& report) {
  std::ostringstream out;
  for (const auto& page : report.pages) out << page_table(page) << "\n";
  if (report.abutment) {
    const Abutment& a = *report.abutment;
    out << a.label << " (truncation " << a.truncation << ")\n";
    for (const auto& [key, shape] : a.graded) {
      if (shape.is_zero()) continue;
      auto st = a.stable.find(key);
      out << "  (" << key.first << ", " << key.second << "): " << shape.describe(a.ground)
          << (st != a.stable.end() && st->second ? "" : " (unstable)") << "\n";
    }
    out << "\n";
  }
  out << "regularity: " << report.regularity.summary() << "\n";
  if (report.comodule) out << "comodule: " << report.comodule->summary() << "\n";
  out << "towers: " << (report.towers_exact ? "exact" : "NOT exact") << " (" << report.tower_checks << " checks)\n";
  out << "parity collapse: " << (report.parity.collapsed ? "certified" : "not certified") << " ("
      << report.parity.checked << " cells)\n";
  if (report.comparison)
    out << "abutment comparison: " << (report.comparison->matches ? "matches" : "differs") << " ("
        << report.comparison->compared << " cells, " << report.comparison->masked_excluded << " masked, "
        << report.comparison->unstable_excluded << " unstable)\n";
  for (const auto& c : report.turn_checks)
    out << "turn check r=" << c.r << ": " << c.compared << " cells, " << c.mismatches.size() << " mismatches\n";
  for (const auto& l : report.linearity)
    out << "linearity r=" << l.r << ": " << l.checks << " checks, " << (l.linear ? "linear" : l.first_failure) << "\n";
  for (const auto& page : report.pages)
    out << "masked on E_" << page.r << ": " << page.masked_count() << " of " << page.cells.size() << "\n";
  for (const auto& t : report.timings)
    out << "time " << t.phase << ": " << std::fixed << std::setprecision(3) << t.seconds << " s\n";
  return out.str();
}

std::string page_svg(const Page& page) {
  const int step = 24;
  const int margin = 48;
  const int columns = page.t_max - page.t_min + 1;
  const int rows = page.s_max - page.s_min + 1;
  const int width = 2 * margin + columns * step;
  const int height = 2 * margin + rows * step;
  auto x = [&](int t) { return margin + (t - page.t_min) * step + step / 2; };
  auto y = [&](int s) { return margin + (page.s_max - s) * step + step / 2; };
  const PageRecord record = page_record(page);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<defs><marker id=\"arrow\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
         "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#b03030\"/></marker></defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << margin / 2 << "\" font-family=\"sans-serif\" font-size=\"14\">E_"
      << page.r << " over " << page.ground.describe() << "</text>\n";
  for (int s = page.s_min; s <= page.s_max; ++s)
    out << "<text class=\"axis\" x=\"" << margin - 6 << "\" y=\"" << y(s) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << s << "</text>\n";
  const int label_every = std::max(1, columns / 40 + 1);
  for (int t = page.t_min; t <= page.t_max; ++t)
    if ((t - page.t_min) % label_every == 0)
      out << "<text class=\"axis\" x=\"" << x(t) << "\" y=\"" << height - margin + 14
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << t << "</text>\n";
  for (const auto& c : record.cells)
    if (c.masked)
      out << "<rect class=\"mask\" x=\"" << x(c.t) - step / 2 << "\" y=\"" << y(c.s) - step / 2 << "\" width=\""
          << step << "\" height=\"" << step << "\" fill=\"#dddddd\"/>\n";
  for (const auto& d : record.differentials) {
    const bool nonzero = std::any_of(d.matrix.begin(), d.matrix.end(), [](const auto& row) {
      return std::any_of(row.begin(), row.end(), [](const std::string& v) { return v != "0"; });
    });
    if (!nonzero) continue;
    out << "<line class=\"diff\" data-r=\"" << page.r << "\" x1=\"" << x(d.from.second) << "\" y1=\""
        << y(d.from.first) << "\" x2=\"" << x(d.to.second) << "\" y2=\"" << y(d.to.first)
        << "\" stroke=\"#b03030\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n";
  }
  for (const auto& c : record.cells) {
    const int summands = c.free_rank + static_cast<int>(c.torsion.size());
    const int radius = 3 + 2 * std::min(summands, 4);
    out << "<circle class=\"cell" << (c.masked ? " masked" : "") << "\" data-s=\"" << c.s << "\" data-t=\"" << c.t
        << "\" cx=\"" << x(c.t) << "\" cy=\"" << y(c.s) << "\" r=\"" << radius << "\" "
        << (c.masked ? "fill=\"none\" stroke=\"#888888\"" : "fill=\"#303080\"") << "/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<std::string> emit(const RunReport& report, const std::vector<std::string>& formats,
                              const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory + ": " + ec.message());
  std::vector<std::string> written;
  for (const auto& format : formats) {
    if (format == "json") {
      const fs::path path = fs::path(directory) / "report.json";
      write_file(path, to_json(report));
      written.push_back(path.string());
    } else if (format == "table") {
      const fs::path path = fs::path(directory) / "report.txt";
      write_file(path, to_table(report));
      written.push_back(path.string());
    } else if (format == "svg") {
      for (const auto& page : report.pages) {
        const fs::path path = fs::path(directory) / ("page_" + std::to_string(page.r) + ".svg");
        write_file(path, page_svg(page));
        written.push_back(path.string());
      }
    } else {
      throw ValidationError("unknown output format '" + format + "'");
    }
  }
  return written;
}

}  // namespace hbss
