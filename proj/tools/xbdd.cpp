// Command-line driver: reach | deadlock | scc | next | prev | convert

#include <CLI11.hpp>
#include <json.hpp>

#include <xbdd/xbdd.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum exit_code { ok = 0, usage = 1, bad_input = 2, internal = 3 };

struct options {
  std::string model_path;
  std::string states_path;
  std::string relation_path;
  std::string format;
  std::string partition = "joint";
  std::string ordering = "sloan";
  std::string tier = "shift-replace";
  std::size_t memory = std::size_t{1} << 20;
  std::size_t block = 0; // 0: derived from memory
  std::string out;
  std::string stats_json;
  std::string tmpdir;
  bool full_set = false;
  bool check_monotone = false;
};

void add_common(CLI::App &cmd, options &o) {
  cmd.add_option("--model", o.model_path, "Model file (.pnet or .bnet)");
  cmd.add_option("--format", o.format, "Model format, inferred from the extension by default")
      ->check(CLI::IsMember({"pnet", "bnet"}));
  cmd.add_option("--partition", o.partition, "Transition relation: one diagram or one per transition")
      ->check(CLI::IsMember({"joint", "disjoint"}));
  cmd.add_option("--ordering", o.ordering, "Variable order")->check(CLI::IsMember({"sloan", "input"}));
  cmd.add_option("--opt-tier", o.tier, "Relational product implementation")
      ->check(CLI::IsMember({"naive", "skip-transpose", "pruning-and", "exists-replace",
                             "shift-replace"}));
  cmd.add_option("--memory", o.memory, "Internal memory M in records");
  cmd.add_option("--block", o.block, "Block size B in records (default: M/32 within [2, 1024])");
  cmd.add_option("--out", o.out, "Write the result diagram here (XBDD1)");
  cmd.add_option("--stats-json", o.stats_json, "Write statistics as JSON here ('-' for stdout)");
  cmd.add_option("--tmpdir", o.tmpdir, "Directory for temporary files");
}

nlohmann::json to_json(const xbdd::task_report &r, const xbdd::engine &eng) {
  nlohmann::json j = {
      {"task", r.task},
      {"model", r.model},
      {"wall_ms", r.wall_ms},
      {"iterations", r.iterations},
      {"state_count", r.state_count.to_string()},
      {"result_nodes", r.result_nodes},
      {"peak_resident_records", r.peak_resident_records},
      {"io",
       {{"blocks_read", r.io.blocks_read},
        {"blocks_written", r.io.blocks_written},
        {"records_streamed", r.io.records_streamed},
        {"sorts", r.io.sorts}}},
      {"largest_intermediate_nodes", r.largest_intermediate_nodes},
      {"opt_tier", xbdd::to_string(r.tier)},
      {"memory_records", eng.memory_budget()},
      {"block_records", eng.block_size()},
  };
  if (r.part)
    j["partition"] = xbdd::to_string(*r.part);
  if (r.scc_count)
    j["scc_count"] = r.scc_count->to_string();
  if (r.deadlock_count)
    j["deadlock_count"] = r.deadlock_count->to_string();
  return j;
}

void emit(const options &o, const xbdd::task_report &r, xbdd::engine &eng) {
  if (!o.out.empty())
    xbdd::serialize_file(eng, r.result, o.out);
  const nlohmann::json j = to_json(r, eng);
  if (o.stats_json == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (!o.stats_json.empty()) {
    std::ofstream f(o.stats_json);
    if (!f)
      throw xbdd::input_error("cannot write " + o.stats_json);
    f << j.dump(2) << "\n";
  }
  std::cout << r.task << " " << r.model << ": " << r.state_count.to_string() << " states";
  if (r.deadlock_count && r.task == "scc")
    std::cout << ", " << r.scc_count->to_string() << " SCCs (" << r.deadlock_count->to_string()
              << " deadlocks)";
  std::cout << ", " << r.result_nodes << " nodes, " << r.iterations << " iterations, "
            << static_cast<long long>(r.wall_ms) << " ms\n";
}

xbdd::block_config config_of(const options &o) {
  xbdd::block_config cfg{o.block != 0 ? o.block : xbdd::default_block_size(o.memory), o.memory};
  cfg.validate();
  return cfg;
}

std::string model_name(const std::string &path) { return std::filesystem::path(path).stem().string(); }

xbdd::symbolic_model load_symbolic(xbdd::engine &eng, const options &o) {
  if (o.model_path.empty())
    throw CLI::RequiredError("--model");
  std::optional<xbdd::model_format> fmt;
  if (!o.format.empty())
    fmt = o.format == "pnet" ? xbdd::model_format::pnet : xbdd::model_format::bnet;
  const xbdd::model m = xbdd::load_model(o.model_path, fmt);
  const auto order = o.ordering == "sloan" ? xbdd::order_variables_sloan(m) : xbdd::input_order(m);
  return xbdd::build_symbolic(eng, m, order, xbdd::parse_partition(o.partition));
}

int run(const std::string &task, const options &o) {
  xbdd::engine eng = o.tmpdir.empty() ? xbdd::engine(config_of(o))
                                      : xbdd::engine(config_of(o), o.tmpdir);
  const xbdd::check_options copt{xbdd::parse_opt_tier(o.tier), o.full_set, o.check_monotone};

  if (task == "convert") {
    const xbdd::symbolic_model sm = load_symbolic(eng, o);
    if (o.states_path.empty() && o.relation_path.empty())
      throw CLI::ValidationError("convert", "give --states and/or --relation as output files");
    if (!o.states_path.empty())
      xbdd::serialize_file(eng, sm.initial, o.states_path);
    if (!o.relation_path.empty()) {
      xbdd::diagram joint = xbdd::diagram::terminal(false);
      for (const xbdd::diagram &p : sm.relation.parts)
        joint = xbdd::bdd_or(eng, joint, p);
      xbdd::serialize_file(eng, joint, o.relation_path);
    }
    return ok;
  }

  if (task == "next" || task == "prev") {
    xbdd::task_report r;
    if (!o.model_path.empty()) {
      if (!o.states_path.empty() || !o.relation_path.empty())
        throw CLI::ValidationError(task, "--model excludes --states and --relation");
      const xbdd::symbolic_model sm = load_symbolic(eng, o);
      xbdd::diagram joint = xbdd::diagram::terminal(false);
      for (const xbdd::diagram &p : sm.relation.parts)
        joint = xbdd::bdd_or(eng, joint, p);
      r = xbdd::task_image(eng, sm.initial, joint, task == "next", model_name(o.model_path), copt.tier);
    } else {
      if (o.states_path.empty() || o.relation_path.empty())
        throw CLI::ValidationError(task, "needs --model, or both --states and --relation");
      const xbdd::diagram s = xbdd::deserialize_file(eng, o.states_path);
      const xbdd::diagram rel = xbdd::deserialize_file(eng, o.relation_path);
      r = xbdd::task_image(eng, s, rel, task == "next", model_name(o.states_path), copt.tier);
    }
    emit(o, r, eng);
    return ok;
  }

  if (!o.states_path.empty() || !o.relation_path.empty())
    throw CLI::ValidationError(task, "--states/--relation only apply to next, prev and convert");
  const xbdd::symbolic_model sm = load_symbolic(eng, o);
  const std::string name = model_name(o.model_path);
  xbdd::task_report r = task == "reach"      ? xbdd::task_reachability(eng, sm, name, copt)
                        : task == "deadlock" ? xbdd::task_deadlock(eng, sm, name, copt)
                                             : xbdd::task_scc(eng, sm, name, copt);
  r.part = xbdd::parse_partition(o.partition);
  emit(o, r, eng);
  return ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"I/O-efficient BDD model checker"};
  app.require_subcommand(1);
  options o;
  std::string task;
  for (const char *name : {"reach", "deadlock", "scc", "next", "prev", "convert"}) {
    static const std::map<std::string, std::string> help = {
        {"reach", "Reachable states of a model"},
        {"deadlock", "Reachable states without a successor"},
        {"scc", "Number of strongly connected components of the reachable states"},
        {"next", "One forward image"},
        {"prev", "One backward image"},
        {"convert", "Encode a model and write its initial states and relation as XBDD1 files"}};
    CLI::App *cmd = app.add_subcommand(name, help.at(name));
    add_common(*cmd, o);
    if (std::string(name) == "next" || std::string(name) == "prev" || std::string(name) == "convert") {
      cmd->add_option("--states", o.states_path, "State set file (XBDD1)");
      cmd->add_option("--relation", o.relation_path, "Relation file (XBDD1)");
    }
    if (std::string(name) == "reach" || std::string(name) == "deadlock" || std::string(name) == "scc") {
      cmd->add_flag("--full-set", o.full_set, "Apply the image to the whole set, not the frontier");
      cmd->add_flag("--check-monotone", o.check_monotone, "Check that every step only adds states");
    }
    cmd->callback([&task, name] { task = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return usage;
  }

  try {
    return run(task, o);
  } catch (const CLI::Error &e) {
    std::cerr << "xbdd: " << e.what() << "\n";
    return usage;
  } catch (const xbdd::input_error &e) {
    std::cerr << "xbdd: " << e.what() << "\n";
    return bad_input;
  } catch (const std::exception &e) {
    std::cerr << "xbdd: internal error: " << e.what() << "\n";
    return internal;
  }
}
