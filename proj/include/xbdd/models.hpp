/// @file  models.hpp
/// @brief 1-safe Petri nets and asynchronous Boolean networks: data types,
///        the .pnet / .bnet text formats, and their incidence structure
///
/// .pnet
///     # comment
///     places: p1 p2 p3
///     initial: p1
///     transition t1: in p1 ; out p2 p3
///
/// .bnet
///     targets, factors
///     a, b & !c
///     b, a | c
///     c, 1
///     initial: a !b
///
/// Variables missing from a .bnet initial line start out false.

#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bool_expr.hpp"

namespace xbdd {

struct petri_transition {
  std::string name;
  std::vector<std::size_t> pre;
  std::vector<std::size_t> post;

  friend bool operator==(const petri_transition &, const petri_transition &) = default;
};

struct petri_net {
  std::vector<std::string> places;
  std::vector<petri_transition> transitions;
  std::vector<bool> initial;

  friend bool operator==(const petri_net &, const petri_net &) = default;
};

struct boolean_network {
  std::vector<std::string> variables;
  std::vector<bool_expr> updates;
  std::vector<bool> initial;

  friend bool operator==(const boolean_network &, const boolean_network &) = default;
};

using model = std::variant<petri_net, boolean_network>;

namespace detail {

struct text_line {
  std::string_view text; // without comment and line break
  std::size_t offset;    // of the line start
};

inline std::vector<text_line> split_lines(std::string_view s) {
  std::vector<text_line> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string_view::npos)
      end = s.size();
    const std::string_view raw = s.substr(start, end - start);
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front())))
      line.remove_prefix(1);
    if (!line.empty())
      out.push_back({line, start + static_cast<std::size_t>(line.data() - raw.data())});
    start = end + 1;
  }
  return out;
}

inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;)
    out.push_back(w);
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

/// Strips `key` followed by ':' from the front of `line`
inline std::optional<std::string_view> after_key(std::string_view line, std::string_view key) {
  if (line.substr(0, key.size()) != key)
    return std::nullopt;
  std::string_view rest = line.substr(key.size());
  while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
    rest.remove_prefix(1);
  if (rest.empty() || rest.front() != ':')
    return std::nullopt;
  return rest.substr(1);
}

class name_table {
public:
  explicit name_table(const char *what) : _what(what) {}

  std::size_t add(const std::string &name, std::size_t offset) {
    if (!is_identifier(name))
      throw parse_error("'" + name + "' is not a valid " + _what + " name", offset);
    if (!_index.emplace(name, _names.size()).second)
      throw parse_error("duplicate " + std::string(_what) + " '" + name + "'", offset);
    _names.push_back(name);
    return _names.size() - 1;
  }

  std::size_t at(const std::string &name, std::size_t offset) const {
    const auto it = _index.find(name);
    if (it == _index.end())
      throw parse_error("unknown " + std::string(_what) + " '" + name + "'", offset);
    return it->second;
  }

  bool contains(const std::string &name) const { return _index.contains(name); }
  const std::vector<std::string> &names() const noexcept { return _names; }

private:
  const char *_what;
  std::vector<std::string> _names;
  std::map<std::string, std::size_t, std::less<>> _index;
};

} // namespace detail

inline petri_net parse_pnet(std::string_view text) {
  detail::name_table places("place");
  detail::name_table transitions("transition");
  petri_net net;
  bool have_places = false;
  std::optional<detail::text_line> initial_line;

  for (const detail::text_line &line : detail::split_lines(text)) {
    if (const auto rest = detail::after_key(line.text, "places")) {
      if (have_places)
        throw parse_error("second 'places:' line", line.offset);
      have_places = true;
      for (const std::string &w : detail::words(*rest))
        places.add(w, line.offset);
    } else if (const auto rest = detail::after_key(line.text, "initial")) {
      if (initial_line)
        throw parse_error("second 'initial:' line", line.offset);
      initial_line = detail::text_line{*rest, line.offset};
    } else if (line.text.substr(0, 11) == "transition " || line.text.substr(0, 11) == "transition\t") {
      const std::string_view body = line.text.substr(11);
      const auto colon = body.find(':');
      if (colon == std::string_view::npos)
        throw parse_error("expected ':' after the transition name", line.offset);
      const auto name = detail::words(body.substr(0, colon));
      if (name.size() != 1)
        throw parse_error("expected exactly one transition name", line.offset);
      transitions.add(name[0], line.offset);

      const std::string_view arcs = body.substr(colon + 1);
      const auto semi = arcs.find(';');
      if (semi == std::string_view::npos)
        throw parse_error("expected 'in ... ; out ...'", line.offset);
      auto in = detail::words(arcs.substr(0, semi));
      auto out = detail::words(arcs.substr(semi + 1));
      if (in.empty() || in.front() != "in" || out.empty() || out.front() != "out")
        throw parse_error("expected 'in ... ; out ...'", line.offset);
      petri_transition t{name[0], {}, {}};
      for (std::size_t i = 1; i < in.size(); ++i)
        t.pre.push_back(places.at(in[i], line.offset));
      for (std::size_t i = 1; i < out.size(); ++i)
        t.post.push_back(places.at(out[i], line.offset));
      for (auto *v : {&t.pre, &t.post}) {
        std::sort(v->begin(), v->end());
        if (std::adjacent_find(v->begin(), v->end()) != v->end())
          throw parse_error("place listed twice in transition '" + t.name + "'", line.offset);
      }
      net.transitions.push_back(std::move(t));
    } else {
      throw parse_error("unrecognized line '" + std::string(line.text) + "'", line.offset);
    }
  }

  if (places.names().empty())
    throw input_error("empty model: no places declared");
  net.places = places.names();
  net.initial.assign(net.places.size(), false);
  if (initial_line)
    for (const std::string &w : detail::words(initial_line->text)) {
      const std::size_t p = places.at(w, initial_line->offset);
      if (net.initial[p])
        throw parse_error("place '" + w + "' marked twice", initial_line->offset);
      net.initial[p] = true;
    }
  return net;
}

inline std::string print_pnet(const petri_net &net) {
  std::string s = "places:";
  for (const auto &p : net.places)
    s += " " + p;
  s += "\ninitial:";
  for (std::size_t i = 0; i < net.places.size(); ++i)
    if (net.initial[i])
      s += " " + net.places[i];
  s += "\n";
  for (const petri_transition &t : net.transitions) {
    s += "transition " + t.name + ": in";
    for (const std::size_t p : t.pre)
      s += " " + net.places[p];
    s += " ; out";
    for (const std::size_t p : t.post)
      s += " " + net.places[p];
    s += "\n";
  }
  return s;
}

inline boolean_network parse_bnet(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty())
    throw input_error("empty model: no variables declared");
  {
    const auto header = detail::words(std::string(lines.front().text));
    std::string joined;
    for (const auto &w : header)
      joined += w;
    std::transform(joined.begin(), joined.end(), joined.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (joined != "targets,factors")
      throw parse_error("expected the header 'targets, factors'", lines.front().offset);
  }

  detail::name_table vars("variable");
  boolean_network bn;
  std::vector<std::size_t> update_offsets;
  std::optional<detail::text_line> initial_line;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const detail::text_line &line = lines[i];
    if (const auto rest = detail::after_key(line.text, "initial")) {
      if (initial_line)
        throw parse_error("second 'initial:' line", line.offset);
      initial_line = detail::text_line{*rest, line.offset};
      continue;
    }
    const auto comma = line.text.find(',');
    if (comma == std::string_view::npos)
      throw parse_error("expected 'variable, expression'", line.offset);
    const auto target = detail::words(line.text.substr(0, comma));
    if (target.size() != 1)
      throw parse_error("expected exactly one target variable", line.offset);
    vars.add(target[0], line.offset);
    const std::size_t expr_offset = line.offset + comma + 1;
    try {
      bn.updates.push_back(parse_bool_expr(line.text.substr(comma + 1)));
    } catch (const parse_error &e) {
      throw parse_error("in the update of '" + target[0] + "': " + e.what(),
                        expr_offset + e.offset());
    }
    update_offsets.push_back(line.offset);
  }
  if (vars.names().empty())
    throw input_error("empty model: no variables declared");
  bn.variables = vars.names();
  for (std::size_t v = 0; v < bn.updates.size(); ++v)
    for (const std::string &name : bn.updates[v].support())
      if (!vars.contains(name))
        throw parse_error("update of '" + bn.variables[v] + "' uses undeclared variable '" +
                              name + "'",
                          update_offsets[v]);

  bn.initial.assign(bn.variables.size(), false);
  if (initial_line) {
    std::vector<bool> seen(bn.variables.size(), false);
    for (std::string w : detail::words(initial_line->text)) {
      const bool negated = !w.empty() && w.front() == '!';
      if (negated)
        w.erase(0, 1);
      const std::size_t v = vars.at(w, initial_line->offset);
      if (seen[v])
        throw parse_error("variable '" + w + "' initialized twice", initial_line->offset);
      seen[v] = true;
      bn.initial[v] = !negated;
    }
  }
  return bn;
}

inline std::string print_bnet(const boolean_network &bn) {
  std::string s = "targets, factors\n";
  for (std::size_t v = 0; v < bn.variables.size(); ++v)
    s += bn.variables[v] + ", " + bn.updates[v].to_string() + "\n";
  s += "initial:";
  for (std::size_t v = 0; v < bn.variables.size(); ++v)
    s += std::string(" ") + (bn.initial[v] ? "" : "!") + bn.variables[v];
  s += "\n";
  return s;
}

inline std::string read_text_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw input_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

enum class model_format { pnet, bnet };

inline model_format format_from_extension(const std::filesystem::path &p) {
  const std::string ext = p.extension().string();
  if (ext == ".pnet")
    return model_format::pnet;
  if (ext == ".bnet")
    return model_format::bnet;
  throw input_error("cannot infer the model format of " + p.string() + "; use --format");
}

inline model load_model(const std::filesystem::path &p, std::optional<model_format> format = {}) {
  const std::string text = read_text_file(p);
  if (format.value_or(format_from_extension(p)) == model_format::pnet)
    return parse_pnet(text);
  return parse_bnet(text);
}

/// State variable names in input order
inline const std::vector<std::string> &variable_names(const model &m) {
  if (const auto *net = std::get_if<petri_net>(&m))
    return net->places;
  return std::get<boolean_network>(m).variables;
}

inline std::vector<bool> initial_values(const model &m) {
  if (const auto *net = std::get_if<petri_net>(&m))
    return net->initial;
  return std::get<boolean_network>(m).initial;
}

/// Groups of variables that occur together in one transition (preset and
/// postset) or one update function (its support and its target)
inline std::vector<std::vector<std::size_t>> interaction_groups(const model &m) {
  std::vector<std::vector<std::size_t>> groups;
  if (const auto *net = std::get_if<petri_net>(&m)) {
    for (const petri_transition &t : net->transitions) {
      std::vector<std::size_t> g = t.pre;
      g.insert(g.end(), t.post.begin(), t.post.end());
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
      groups.push_back(std::move(g));
    }
    return groups;
  }
  const auto &bn = std::get<boolean_network>(m);
  std::map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < bn.variables.size(); ++v)
    index[bn.variables[v]] = v;
  for (std::size_t v = 0; v < bn.variables.size(); ++v) {
    std::vector<std::size_t> g{v};
    for (const std::string &name : bn.updates[v].support())
      g.push_back(index.at(name));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    groups.push_back(std::move(g));
  }
  return groups;
}

} // namespace xbdd
