#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "cli_internal.hpp"
#include "hbss/errors.hpp"

namespace hbss {

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }

struct Loc {
  int line = 0;
  int column = 0;
};

struct Item {
  std::string text;
  Loc loc;
};

struct Entry {
  std::string key;
  std::string value;
  Loc key_loc;
  Loc value_loc;
};

const std::set<std::string> kSections{"ring", "sequence", "input", "window", "output"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Trims `text`, which starts at `loc`; the result carries the location of its
// first character.
Item trimmed(const std::string& text, Loc loc) {
  std::size_t b = 0, e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return Item{text.substr(b, e - b), Loc{loc.line, loc.column + static_cast<int>(b)}};
}

// An empty value is an empty list; empty items between delimiters are not.
std::vector<Item> split_items(const Entry& entry, char delimiter) {
  std::vector<Item> out;
  if (entry.value.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = entry.value.find(delimiter, start);
    std::string piece = entry.value.substr(start, end == std::string::npos ? std::string::npos : end - start);
    Item item = trimmed(piece, Loc{entry.value_loc.line, entry.value_loc.column + static_cast<int>(start)});
    if (item.text.empty()) throw SyntaxError("empty list item", item.loc.line, item.loc.column);
    out.push_back(item);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

long parse_integer(const Item& item, const std::string& what) {
  long value = 0;
  const char* first = item.text.data();
  const char* last = first + item.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || item.text.empty())
    throw SyntaxError(what + " must be an integer, got '" + item.text + "'", item.loc.line, item.loc.column);
  return value;
}

int parse_int(const Item& item, const std::string& what) {
  long v = parse_integer(item, what);
  if (v < -1000000 || v > 1000000)
    throw SyntaxError(what + " is out of range", item.loc.line, item.loc.column);
  return static_cast<int>(v);
}

Item value_item(const Entry& e) { return Item{e.value, e.value_loc}; }

// Syntax of an element expression, reported at the item's location.
void check_expression(const Item& item) {
  try {
    parse_symbolic(item.text);
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.bare_message(), item.loc.line, item.loc.column + std::max(e.column(), 1) - 1);
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Reads lines into sections. Throws SyntaxError on structural problems.
std::map<std::string, std::vector<Entry>> lex(const std::string& text, std::map<std::string, Loc>& headers) {
  std::map<std::string, std::vector<Entry>> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool any = false;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string body = raw.substr(0, raw.find('#'));
    Item whole = trimmed(body, Loc{line, 1});
    if (whole.text.empty()) continue;
    any = true;
    if (whole.text.front() == '[') {
      if (whole.text.back() != ']') throw SyntaxError("unterminated section header", line, whole.loc.column);
      Item name = trimmed(whole.text.substr(1, whole.text.size() - 2), Loc{line, whole.loc.column + 1});
      if (!kSections.count(name.text))
        throw SyntaxError("unknown section '" + name.text + "'", line, name.loc.column);
      if (headers.count(name.text)) throw SyntaxError("duplicate section [" + name.text + "]", line, name.loc.column);
      section = name.text;
      headers[section] = whole.loc;
      out[section];
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw SyntaxError("expected 'key = value'", line, whole.loc.column);
    if (section.empty()) throw SyntaxError("key outside of any section", line, whole.loc.column);
    Item key = trimmed(body.substr(0, eq), Loc{line, 1});
    if (!is_identifier(key.text)) throw SyntaxError("invalid key '" + key.text + "'", line, key.loc.column);
    Item value = trimmed(body.substr(eq + 1), Loc{line, static_cast<int>(eq) + 2});
    for (const auto& e : out[section])
      if (e.key == key.text) throw SyntaxError("duplicate key '" + key.text + "'", line, key.loc.column);
    out[section].push_back(Entry{key.text, value.text, key.loc, value.loc});
  }
  if (!any) throw SyntaxError("empty specification", 1, 1);
  return out;
}

std::optional<int> operator_index(const std::string& key) {
  if (key.size() < 2 || key[0] != 'Q') return std::nullopt;
  int j = 0;
  for (std::size_t i = 1; i < key.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(key[i]))) return std::nullopt;
    if (j > 10000) return std::nullopt;
    j = j * 10 + (key[i] - '0');
  }
  return j;
}

std::string prefix(const std::optional<std::pair<int, int>>& loc) {
  if (!loc) return "";
  return "line " + std::to_string(loc->first) + ", column " + std::to_string(loc->second) + ": ";
}

bool valid_basis_name(const std::string& name) { return name == "1" || is_identifier(name); }

FreeElement parse_combination(const GradedRing& ring, const std::vector<ModuleGenerator>& basis,
                              const std::string& text) {
  const SymbolicPolynomial sym = parse_symbolic(text);
  FreeElement out(basis.size(), ring.zero());
  auto index = [&](const std::string& name) {
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (basis[i].name == name) return static_cast<int>(i);
    return -1;
  };
  for (const auto& [power, coefficient] : sym) {
    int which = -1;
    SymbolPower rest;
    for (const auto& [name, e] : power) {
      const int idx = index(name);
      if (idx < 0) {
        rest[name] = e;
        continue;
      }
      if (e != 1 || which >= 0)
        throw ValidationError("every term of '" + text + "' needs exactly one basis element to the first power");
      which = idx;
    }
    if (which < 0) which = index("1");
    if (which < 0) throw ValidationError("'" + text + "' has a term without a basis element and there is no basis element 1");
    out[static_cast<std::size_t>(which)] =
        out[static_cast<std::size_t>(which)] + ring.from_symbolic(SymbolicPolynomial{{rest, coefficient}});
  }
  return out;
}

}  // namespace

namespace detail {

Problem materialize(const ProblemSpec& spec, const Locator& locate) {
  Problem out;
  out.window = spec.window;
  std::vector<std::string> problems;
  auto where = [&](const std::string& field, int index) {
    return locate ? locate(field, index) : std::optional<std::pair<int, int>>{};
  };
  auto attempt = [&](const std::string& field, int index, const auto& fn) {
    try {
      fn();
      return true;
    } catch (const ValidationError& e) {
      problems.push_back(prefix(where(field, index)) + e.what());
    } catch (const SyntaxError& e) {
      auto loc = where(field, index);
      if (!loc) throw;
      throw SyntaxError(e.bare_message(), loc->first, loc->second + std::max(e.column(), 1) - 1);
    }
    return false;
  };
  auto finish = [&]() {
    if (!problems.empty()) throw ValidationError(join(problems, "\n"));
  };

  // Ring.
  std::optional<Coefficients> ground;
  attempt("ring.prime", -1, [&] {
    if (!is_prime(spec.ring.prime)) throw ValidationError(std::to_string(spec.ring.prime) + " is not a prime");
  });
  finish();
  attempt("ring.coefficients", -1, [&] {
    const std::string& c = spec.ring.coefficients;
    if (c == "Z_(p)") {
      ground = Coefficients::p_local(spec.ring.prime);
    } else if (c == "F_p") {
      ground = Coefficients::prime_field(spec.ring.prime);
    } else if (c == "Z/p^k") {
      if (spec.ring.exponent < 1) throw ValidationError("the exponent of Z/p^k must be at least 1");
      ground = Coefficients::prime_power(spec.ring.prime, spec.ring.exponent);
    } else {
      throw ValidationError("coefficients must be Z_(p), F_p or Z/p^k");
    }
  });
  finish();
  for (std::size_t i = 0; i < spec.ring.generators.size(); ++i)
    attempt("ring.generators", static_cast<int>(i), [&] { GradedRing(*ground, {spec.ring.generators[i]}); });
  finish();
  attempt("ring.generators", -1, [&] { out.ring.emplace(*ground, spec.ring.generators); });
  finish();
  const GradedRing& ring = *out.ring;

  // Sequence.
  std::vector<Polynomial> elements;
  if (spec.sequence.empty()) problems.push_back(prefix(where("sequence.elements", -1)) + "the sequence is empty");
  for (std::size_t i = 0; i < spec.sequence.size(); ++i)
    attempt("sequence.elements", static_cast<int>(i), [&] { elements.push_back(ring.parse(spec.sequence[i])); });
  finish();
  attempt("sequence.elements", -1, [&] { out.sequence.emplace(ring, elements, spec.sequence); });
  finish();
  const RegularSequence& seq = *out.sequence;

  // Window.
  attempt("window.degrees", -1, [&] {
    if (spec.window.degree_min > spec.window.degree_max)
      throw ValidationError("the degree range is empty");
  });
  attempt("window.max_filtration", -1, [&] {
    if (spec.window.max_filtration < 1) throw ValidationError("max_filtration must be at least 1");
  });
  attempt("window.max_page", -1, [&] {
    if (spec.window.max_page < 1) throw ValidationError("max_page must be at least 1");
  });

  // Output.
  for (std::size_t i = 0; i < spec.output.formats.size(); ++i)
    attempt("output.formats", static_cast<int>(i), [&] {
      const auto& f = spec.output.formats[i];
      if (f != "json" && f != "table" && f != "svg")
        throw ValidationError("unknown output format '" + f + "' (json, table, svg)");
    });
  attempt("output.path", -1, [&] {
    if (spec.output.path.empty()) throw ValidationError("the output path is empty");
  });

  const auto& in = spec.input;
  if (in.mode == "comodule") {
    if (in.generator_degree != 0 || !in.relations.empty())
      problems.push_back(prefix(where("input.mode", -1)) +
                         "generator_degree and presentation relations need mode = presentation");
    std::optional<ResidueRing> residue;
    attempt("sequence.elements", -1, [&] { residue = residue_ring(seq); });
    if (in.basis.empty()) problems.push_back(prefix(where("input.mode", -1)) + "comodule mode needs a basis");
    std::set<std::string> names;
    for (std::size_t i = 0; i < in.basis.size(); ++i)
      attempt("input.basis", static_cast<int>(i), [&] {
        const std::string& name = in.basis[i].name;
        if (!valid_basis_name(name)) throw ValidationError("invalid basis name '" + name + "'");
        if (name == "p" || ring.index_of(name)) throw ValidationError("basis name '" + name + "' is a ring symbol");
        if (!names.insert(name).second) throw ValidationError("duplicate basis element '" + name + "'");
      });
    for (std::size_t j = 0; j < in.operators.size(); ++j)
      if (static_cast<int>(j) >= seq.size() && !in.operators[j].empty())
        problems.push_back(prefix(where("input.Q" + std::to_string(j), -1)) + "Q" + std::to_string(j) +
                           " has no matching sequence element");
    finish();
    const GradedRing& l = residue->ring;
    std::vector<FreeElement> relations;
    for (std::size_t i = 0; i < in.comodule_relations.size(); ++i)
      attempt("input.relations", static_cast<int>(i),
              [&] { relations.push_back(parse_combination(l, in.basis, in.comodule_relations[i])); });
    finish();
    std::optional<GradedModule> module;
    attempt("input.relations", -1, [&] { module.emplace(l, in.basis, relations); });
    finish();
    std::vector<int> degrees;
    std::vector<std::vector<FreeElement>> images;
    for (int j = 0; j < seq.size(); ++j) {
      degrees.push_back(seq.degree(j));
      images.emplace_back(in.basis.size(), module->zero_element());
      if (static_cast<std::size_t>(j) >= in.operators.size()) continue;
      std::set<std::string> seen;
      const std::string field = "input.Q" + std::to_string(j);
      for (std::size_t i = 0; i < in.operators[u(j)].size(); ++i) {
        const auto& [source, image] = in.operators[u(j)][i];
        attempt(field, static_cast<int>(i), [&] {
          auto it = std::find_if(in.basis.begin(), in.basis.end(),
                                 [&](const ModuleGenerator& g) { return g.name == source; });
          if (it == in.basis.end()) throw ValidationError("unknown basis element '" + source + "'");
          if (!seen.insert(source).second) throw ValidationError("Q" + std::to_string(j) + "(" + source + ") given twice");
          images.back()[static_cast<std::size_t>(it - in.basis.begin())] = parse_combination(l, in.basis, image);
        });
      }
    }
    finish();
    attempt("input.Q0", -1, [&] { out.comodule.emplace(*module, degrees, images); });
    if (!in.abutment_relations.empty()) {
      std::vector<Polynomial> rels;
      for (std::size_t i = 0; i < in.abutment_relations.size(); ++i)
        attempt("input.abutment_relations", static_cast<int>(i),
                [&] { rels.push_back(ring.parse(in.abutment_relations[i])); });
      finish();
      attempt("input.abutment_relations", -1, [&] { out.abutment_module.emplace(GradedModule::cyclic(ring, rels)); });
    }
  } else if (in.mode == "presentation") {
    if (!in.basis.empty() || !in.comodule_relations.empty() || !in.abutment_relations.empty() ||
        std::any_of(in.operators.begin(), in.operators.end(), [](const auto& o) { return !o.empty(); }))
      problems.push_back(prefix(where("input.mode", -1)) +
                         "basis, operators and abutment_relations need mode = comodule");
    std::vector<FreeElement> relations;
    for (std::size_t i = 0; i < in.relations.size(); ++i)
      attempt("input.relations", static_cast<int>(i), [&] { relations.push_back({ring.parse(in.relations[i])}); });
    finish();
    attempt("input.relations", -1, [&] {
      out.module.emplace(ring, std::vector<ModuleGenerator>{{"1", in.generator_degree}}, relations);
    });
  } else {
    problems.push_back(prefix(where("input.mode", -1)) + "mode must be comodule or presentation");
  }
  finish();
  return out;
}

}  // namespace detail

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  auto same_gens = [](const std::vector<RingGenerator>& a, const std::vector<RingGenerator>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
             return x.name == y.name && x.degree == y.degree && x.invertible == y.invertible;
           });
  };
  auto same_basis = [](const std::vector<ModuleGenerator>& a, const std::vector<ModuleGenerator>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
             return x.name == y.name && x.degree == y.degree;
           });
  };
  const auto& w = window;
  const auto& v = o.window;
  return ring.coefficients == o.ring.coefficients && ring.prime == o.ring.prime &&
         ring.exponent == o.ring.exponent && same_gens(ring.generators, o.ring.generators) &&
         sequence == o.sequence && input.mode == o.input.mode && same_basis(input.basis, o.input.basis) &&
         input.operators == o.input.operators && input.comodule_relations == o.input.comodule_relations &&
         input.abutment_relations == o.input.abutment_relations &&
         input.generator_degree == o.input.generator_degree && input.relations == o.input.relations &&
         w.degree_min == v.degree_min && w.degree_max == v.degree_max && w.max_filtration == v.max_filtration &&
         w.max_page == v.max_page && output.formats == o.output.formats && output.path == o.output.path;
}

ProblemSpec parse_spec(const std::string& text) {
  std::map<std::string, Loc> headers;
  const auto sections = lex(text, headers);
  ProblemSpec spec;
  std::vector<std::string> problems;
  // field -> {value location, item locations...}
  std::map<std::string, std::vector<Loc>> locations;
  auto note = [&](const std::string& field, const Entry& e, const std::vector<Item>& items = {}) {
    auto& v = locations[field];
    v.push_back(e.value_loc);
    for (const auto& it : items) v.push_back(it.loc);
  };
  auto find = [&](const std::string& section, const std::string& key) -> const Entry* {
    auto it = sections.find(section);
    if (it == sections.end()) return nullptr;
    for (const auto& e : it->second)
      if (e.key == key) return &e;
    return nullptr;
  };
  auto missing = [&](const std::string& section, const std::string& key) {
    auto h = headers.find(section);
    std::string where = h == headers.end() ? "" : prefix(std::pair{h->second.line, h->second.column});
    problems.push_back(where + "missing key '" + key + "' in [" + section + "]");
  };

  const std::map<std::string, std::set<std::string>> allowed{
      {"ring", {"coefficients", "prime", "generators"}},
      {"sequence", {"elements"}},
      {"input", {"mode", "basis", "relations", "abutment_relations", "generator_degree"}},
      {"window", {"degrees", "max_filtration", "max_page"}},
      {"output", {"formats", "path"}}};
  for (const auto& [section, entries] : sections)
    for (const auto& e : entries)
      if (!allowed.at(section).count(e.key) && !(section == "input" && operator_index(e.key)))
        problems.push_back(prefix(std::pair{e.key_loc.line, e.key_loc.column}) + "unknown key '" + e.key +
                           "' in [" + section + "]");

  // [ring]
  if (const Entry* e = find("ring", "coefficients")) {
    note("ring.coefficients", *e);
    const std::string& c = e->value;
    if (c.rfind("Z/p^", 0) == 0) {
      spec.ring.coefficients = "Z/p^k";
      spec.ring.exponent = parse_int(Item{c.substr(4), Loc{e->value_loc.line, e->value_loc.column + 4}}, "exponent");
    } else {
      spec.ring.coefficients = c;
    }
  }
  if (const Entry* e = find("ring", "prime")) {
    note("ring.prime", *e);
    spec.ring.prime = parse_integer(value_item(*e), "prime");
  } else {
    missing("ring", "prime");
  }
  if (const Entry* e = find("ring", "generators")) {
    auto items = split_items(*e, ',');
    note("ring.generators", *e, items);
    for (const auto& item : items) {
      std::vector<Item> parts = split_items(Entry{"", item.text, item.loc, item.loc}, ':');
      if (parts.size() < 2 || parts.size() > 3)
        throw SyntaxError("expected name:degree or name:degree:invertible", item.loc.line, item.loc.column);
      if (parts.size() == 3 && parts[2].text != "invertible")
        throw SyntaxError("expected 'invertible'", parts[2].loc.line, parts[2].loc.column);
      spec.ring.generators.push_back(
          RingGenerator{parts[0].text, parse_int(parts[1], "generator degree"), parts.size() == 3});
    }
  }

  // [sequence]
  if (const Entry* e = find("sequence", "elements")) {
    auto items = split_items(*e, ',');
    note("sequence.elements", *e, items);
    for (const auto& item : items) {
      check_expression(item);
      spec.sequence.push_back(item.text);
    }
  } else {
    missing("sequence", "elements");
  }

  // [input]
  if (const Entry* e = find("input", "mode")) {
    note("input.mode", *e);
    spec.input.mode = e->value;
  } else {
    missing("input", "mode");
  }
  const bool comodule = spec.input.mode == "comodule";
  if (const Entry* e = find("input", "basis")) {
    auto items = split_items(*e, ',');
    note("input.basis", *e, items);
    for (const auto& item : items) {
      std::vector<Item> parts = split_items(Entry{"", item.text, item.loc, item.loc}, ':');
      if (parts.size() != 2) throw SyntaxError("expected name:degree", item.loc.line, item.loc.column);
      spec.input.basis.push_back(ModuleGenerator{parts[0].text, parse_int(parts[1], "basis degree")});
    }
  }
  if (const Entry* e = find("input", "relations")) {
    auto items = split_items(*e, ',');
    note("input.relations", *e, items);
    for (const auto& item : items) {
      check_expression(item);
      (comodule ? spec.input.comodule_relations : spec.input.relations).push_back(item.text);
    }
  }
  if (const Entry* e = find("input", "abutment_relations")) {
    auto items = split_items(*e, ',');
    note("input.abutment_relations", *e, items);
    for (const auto& item : items) {
      check_expression(item);
      spec.input.abutment_relations.push_back(item.text);
    }
  }
  if (const Entry* e = find("input", "generator_degree")) {
    note("input.generator_degree", *e);
    spec.input.generator_degree = parse_int(value_item(*e), "generator_degree");
  }
  if (auto it = sections.find("input"); it != sections.end()) {
    for (const auto& e : it->second) {
      auto j = operator_index(e.key);
      if (!j) continue;
      auto items = split_items(e, ';');
      // Image items point at the text after "->".
      std::vector<Item> images;
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const auto& item : items) {
        const std::size_t arrow = item.text.find("->");
        if (arrow == std::string::npos)
          throw SyntaxError("expected 'basis -> image'", item.loc.line, item.loc.column);
        Item source = trimmed(item.text.substr(0, arrow), item.loc);
        Item image = trimmed(item.text.substr(arrow + 2),
                             Loc{item.loc.line, item.loc.column + static_cast<int>(arrow) + 2});
        if (source.text.empty() || image.text.empty())
          throw SyntaxError("expected 'basis -> image'", item.loc.line, item.loc.column);
        check_expression(image);
        images.push_back(image);
        pairs.emplace_back(source.text, image.text);
      }
      note("input.Q" + std::to_string(*j), e, images);
      if (spec.input.operators.size() <= static_cast<std::size_t>(*j)) spec.input.operators.resize(u(*j) + 1);
      spec.input.operators[u(*j)] = std::move(pairs);
    }
  }
  if (comodule && spec.input.operators.size() < spec.sequence.size())
    spec.input.operators.resize(spec.sequence.size());
  if (!locations.count("input.Q0") && locations.count("input.mode")) locations["input.Q0"] = locations["input.mode"];

  // [window]
  if (const Entry* e = find("window", "degrees")) {
    note("window.degrees", *e);
    const std::size_t dots = e->value.find("..");
    if (dots == std::string::npos)
      throw SyntaxError("expected a degree range a..b", e->value_loc.line, e->value_loc.column);
    spec.window.degree_min = parse_int(trimmed(e->value.substr(0, dots), e->value_loc), "degree");
    spec.window.degree_max = parse_int(
        trimmed(e->value.substr(dots + 2), Loc{e->value_loc.line, e->value_loc.column + static_cast<int>(dots) + 2}),
        "degree");
  } else {
    missing("window", "degrees");
  }
  if (const Entry* e = find("window", "max_filtration")) {
    note("window.max_filtration", *e);
    spec.window.max_filtration = parse_int(value_item(*e), "max_filtration");
  }
  if (const Entry* e = find("window", "max_page")) {
    note("window.max_page", *e);
    spec.window.max_page = parse_int(value_item(*e), "max_page");
  }

  // [output]
  if (const Entry* e = find("output", "formats")) {
    auto items = split_items(*e, ',');
    note("output.formats", *e, items);
    spec.output.formats.clear();
    for (const auto& item : items) spec.output.formats.push_back(item.text);
  }
  if (const Entry* e = find("output", "path")) {
    note("output.path", *e);
    spec.output.path = e->value;
  }

  if (!problems.empty()) throw ValidationError(join(problems, "\n"));
  detail::materialize(spec, [&](const std::string& field, int index) -> std::optional<std::pair<int, int>> {
    auto it = locations.find(field);
    if (it == locations.end() || it->second.empty()) return std::nullopt;
    const std::size_t k = index >= 0 && static_cast<std::size_t>(index) + 1 < it->second.size()
                              ? static_cast<std::size_t>(index) + 1
                              : 0;
    return std::pair{it->second[k].line, it->second[k].column};
  });
  return spec;
}

std::string print_spec(const ProblemSpec& spec) {
  std::ostringstream out;
  auto list = [](const std::vector<std::string>& items) { return join(items, ", "); };
  out << "[ring]\n";
  out << "coefficients = "
      << (spec.ring.coefficients == "Z/p^k" ? "Z/p^" + std::to_string(spec.ring.exponent) : spec.ring.coefficients)
      << "\n";
  out << "prime = " << spec.ring.prime << "\n";
  if (!spec.ring.generators.empty()) {
    std::vector<std::string> gens;
    for (const auto& g : spec.ring.generators)
      gens.push_back(g.name + ":" + std::to_string(g.degree) + (g.invertible ? ":invertible" : ""));
    out << "generators = " << list(gens) << "\n";
  }
  out << "\n[sequence]\nelements = " << list(spec.sequence) << "\n";
  out << "\n[input]\nmode = " << spec.input.mode << "\n";
  const auto& in = spec.input;
  if (!in.basis.empty()) {
    std::vector<std::string> basis;
    for (const auto& g : in.basis) basis.push_back(g.name + ":" + std::to_string(g.degree));
    out << "basis = " << list(basis) << "\n";
  }
  for (std::size_t j = 0; j < in.operators.size(); ++j) {
    if (in.operators[j].empty()) continue;
    std::vector<std::string> pairs;
    for (const auto& [source, image] : in.operators[j]) pairs.push_back(source + " -> " + image);
    out << "Q" << j << " = " << join(pairs, "; ") << "\n";
  }
  if (in.mode == "presentation") {
    out << "generator_degree = " << in.generator_degree << "\n";
    if (!in.relations.empty()) out << "relations = " << list(in.relations) << "\n";
  } else {
    if (in.generator_degree != 0) out << "generator_degree = " << in.generator_degree << "\n";
    if (!in.comodule_relations.empty()) out << "relations = " << list(in.comodule_relations) << "\n";
  }
  if (!in.abutment_relations.empty()) out << "abutment_relations = " << list(in.abutment_relations) << "\n";
  out << "\n[window]\n";
  out << "degrees = " << spec.window.degree_min << ".." << spec.window.degree_max << "\n";
  out << "max_filtration = " << spec.window.max_filtration << "\n";
  out << "max_page = " << spec.window.max_page << "\n";
  out << "\n[output]\n";
  out << "formats = " << list(spec.output.formats) << "\n";
  out << "path = " << spec.output.path << "\n";
  return out.str();
}

namespace {

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table{
      {"moore-p",
       "# Mod-p Moore input over Z_(3)[v1]: Lambda(a0) with Q0(a0) = 1.\n"
       "[ring]\n"
       "coefficients = Z_(p)\n"
       "prime = 3\n"
       "generators = v1:4\n"
       "\n[sequence]\n"
       "elements = p, v1\n"
       "\n[input]\n"
       "mode = comodule\n"
       "basis = 1:0, a0:1\n"
       "Q0 = a0 -> 1\n"
       "abutment_relations = p\n"
       "\n[window]\n"
       "degrees = -2..24\n"
       "max_filtration = 5\n"
       "max_page = 2\n"
       "\n[output]\n"
       "formats = json, table, svg\n"
       "path = moore-p\n"},
      {"moore-p2",
       "# T/p^2 over Z_(3)[v1], filtered by (p, v1).\n"
       "[ring]\n"
       "coefficients = Z_(p)\n"
       "prime = 3\n"
       "generators = v1:4\n"
       "\n[sequence]\n"
       "elements = p, v1\n"
       "\n[input]\n"
       "mode = presentation\n"
       "generator_degree = 0\n"
       "relations = p^2\n"
       "\n[window]\n"
       "degrees = -2..24\n"
       "max_filtration = 5\n"
       "max_page = 3\n"
       "\n[output]\n"
       "formats = json, table, svg\n"
       "path = moore-p2\n"},
      {"smith-toda-v",
       "# Lambda(a0, a1) over Z_(5)[v1, v2^+-1] with both derivations.\n"
       "[ring]\n"
       "coefficients = Z_(p)\n"
       "prime = 5\n"
       "generators = v1:8, v2:48:invertible\n"
       "\n[sequence]\n"
       "elements = p, v1\n"
       "\n[input]\n"
       "mode = comodule\n"
       "basis = 1:0, a0:1, a1:9, a0a1:10\n"
       "Q0 = a0 -> 1; a0a1 -> a1\n"
       "Q1 = a1 -> 1; a0a1 -> -a0\n"
       "abutment_relations = p, v1\n"
       "\n[window]\n"
       "degrees = -50..100\n"
       "max_filtration = 3\n"
       "max_page = 2\n"
       "\n[output]\n"
       "formats = json, table, svg\n"
       "path = smith-toda-v\n"},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : presets()) out.push_back(name);
  return out;
}

std::string preset_text(const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end())
    throw ValidationError("unknown preset '" + name + "' (" + join(preset_names(), ", ") + ")");
  return it->second;
}

}  // namespace hbss
