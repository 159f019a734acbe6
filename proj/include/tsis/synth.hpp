#pragma once

// Test-case driven synthesizer over the bundled toy DSL. The test-case type
// signature picks one instruction-subset family; each subset of that family,
// in order, restricts a bottom-up enumerative search.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tsis/catalog.hpp"
#include "tsis/detail/parallel.hpp"
#include "tsis/error.hpp"
#include "tsis/families.hpp"
#include "tsis/typesig.hpp"

namespace tsis {

using Value = nlohmann::json;

// Integral finite doubles become integers, recursively, so that equal values
// compare and serialize identically whatever arithmetic produced them.
inline Value normalize_value(Value v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9.0e15) return Value(static_cast<std::int64_t>(d));
    return v;
  }
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(INT64_MAX)) return Value(static_cast<std::int64_t>(u));
    return v;
  }
  if (v.is_array() || v.is_object())
    for (auto& child : v) child = normalize_value(std::move(child));
  return v;
}

struct TestCase {
  std::vector<Value> inputs;
  Value output;
};

inline std::vector<TestCase> cases_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array())
    throw CaseFileError("test-case document needs a 'cases' array");
  std::vector<TestCase> out;
  for (const auto& c : doc["cases"]) {
    if (!c.is_object() || !c.contains("inputs") || !c["inputs"].is_array() || !c.contains("output"))
      throw CaseFileError("each case needs an 'inputs' array and an 'output'");
    TestCase tc;
    for (const auto& v : c["inputs"]) tc.inputs.push_back(normalize_value(v));
    tc.output = normalize_value(c["output"]);
    out.push_back(std::move(tc));
  }
  return out;
}

// Union of top-level input types and of output types across all cases.
inline TypeSignature infer_signature(const std::vector<TestCase>& cases) {
  if (cases.empty()) throw InvalidParameter("no test cases");
  TypeSignature sig;
  const auto arity = cases.front().inputs.size();
  for (const auto& c : cases) {
    if (c.inputs.size() != arity)
      throw InconsistentArity("test cases have " + std::to_string(arity) + " and " +
                              std::to_string(c.inputs.size()) + " inputs");
    for (const auto& v : c.inputs) sig.inputs.insert(type_of_value(v));
    sig.outputs.insert(type_of_value(c.output));
  }
  return sig;
}

// --- DSL -------------------------------------------------------------------

struct DslInstruction {
  std::string id;
  std::vector<DataType> params;
  DataType result;
  std::function<Value(std::span<const Value>)> eval;
};

namespace detail {

inline double number_arg(const Value& v, const char* op) {
  if (!v.is_number()) throw EvaluationFault(std::string(op) + ": expected a number");
  return v.get<double>();
}

inline const std::string& string_arg(const Value& v, const char* op) {
  if (!v.is_string()) throw EvaluationFault(std::string(op) + ": expected a string");
  return v.get_ref<const std::string&>();
}

inline Value number_result(double d, const char* op) {
  if (!std::isfinite(d)) throw EvaluationFault(std::string(op) + ": non-finite result");
  return normalize_value(Value(d));
}

inline std::size_t index_arg(const Value& v, std::size_t size, const char* op) {
  const double d = number_arg(v, op);
  if (std::floor(d) != d || d < 0 || d >= static_cast<double>(size))
    throw EvaluationFault(std::string(op) + ": index out of range");
  return static_cast<std::size_t>(d);
}

inline std::map<std::string, DslInstruction, std::less<>> build_dsl() {
  using T = DataType;
  std::map<std::string, DslInstruction, std::less<>> m;
  auto def = [&](const char* id, std::vector<T> params, T result, std::function<Value(std::span<const Value>)> fn) {
    m.emplace(id, DslInstruction{id, std::move(params), result, std::move(fn)});
  };
  auto arith = [&](const char* id, double (*op)(double, double)) {
    def(id, {T::Number, T::Number}, T::Number, [id, op](std::span<const Value> a) {
      return number_result(op(number_arg(a[0], id), number_arg(a[1], id)), id);
    });
  };

  arith("add", [](double x, double y) { return x + y; });
  arith("sub", [](double x, double y) { return x - y; });
  arith("mul", [](double x, double y) { return x * y; });
  def("div", {T::Number, T::Number}, T::Number, [](std::span<const Value> a) {
    const double d = number_arg(a[1], "div");
    if (d == 0) throw EvaluationFault("div: division by zero");
    return number_result(number_arg(a[0], "div") / d, "div");
  });

  def("concat", {T::String, T::String}, T::String,
      [](std::span<const Value> a) { return Value(string_arg(a[0], "concat") + string_arg(a[1], "concat")); });
  def("upper", {T::String}, T::String, [](std::span<const Value> a) {
    std::string s = string_arg(a[0], "upper");
    for (char& c : s)
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return Value(s);
  });
  def("strlen", {T::String}, T::Number,
      [](std::span<const Value> a) { return Value(static_cast<std::int64_t>(string_arg(a[0], "strlen").size())); });
  def("to_str", {T::Number}, T::String, [](std::span<const Value> a) {
    number_arg(a[0], "to_str");
    return Value(a[0].dump());
  });

  def("length", {T::Array}, T::Number, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("length: expected an array");
    return Value(static_cast<std::int64_t>(a[0].size()));
  });
  def("get", {T::Array, T::Number}, T::Number, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("get: expected an array");
    const auto& elem = a[0][index_arg(a[1], a[0].size(), "get")];
    if (!elem.is_number()) throw EvaluationFault("get: element is not a number");
    return elem;
  });
  def("append", {T::Array, T::Number}, T::Array, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("append: expected an array");
    number_arg(a[1], "append");
    Value out = a[0];
    out.push_back(a[1]);
    return out;
  });
  def("sum", {T::Array}, T::Number, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("sum: expected an array");
    double total = 0;
    for (const auto& e : a[0]) total += number_arg(e, "sum");
    return number_result(total, "sum");
  });
  def("reverse", {T::Array}, T::Array, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("reverse: expected an array");
    Value out = Value::array();
    for (auto it = a[0].rbegin(); it != a[0].rend(); ++it) out.push_back(*it);
    return out;
  });
  def("sort", {T::Array}, T::Array, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("sort: expected an array");
    Value out = a[0];
    const bool numbers = std::all_of(out.begin(), out.end(), [](const Value& e) { return e.is_number(); });
    const bool strings = std::all_of(out.begin(), out.end(), [](const Value& e) { return e.is_string(); });
    if (!numbers && !strings) throw EvaluationFault("sort: mixed or structured elements");
    std::stable_sort(out.begin(), out.end());
    return out;
  });
  def("split", {T::String, T::String}, T::Array, [](std::span<const Value> a) {
    const auto& s = string_arg(a[0], "split");
    const auto& sep = string_arg(a[1], "split");
    if (sep.empty()) throw EvaluationFault("split: empty separator");
    Value out = Value::array();
    std::size_t start = 0;
    for (auto pos = s.find(sep); pos != std::string::npos; pos = s.find(sep, start)) {
      out.push_back(s.substr(start, pos - start));
      start = pos + sep.size();
    }
    out.push_back(s.substr(start));
    return out;
  });
  def("join", {T::Array, T::String}, T::String, [](std::span<const Value> a) {
    if (!a[0].is_array()) throw EvaluationFault("join: expected an array");
    const auto& sep = string_arg(a[1], "join");
    std::string out;
    for (std::size_t i = 0; i < a[0].size(); ++i) out += (i ? sep : "") + string_arg(a[0][i], "join");
    return Value(out);
  });

  def("keys", {T::Hashmap}, T::Array, [](std::span<const Value> a) {
    if (!a[0].is_object()) throw EvaluationFault("keys: expected an object");
    Value out = Value::array();
    for (const auto& [k, v] : a[0].items()) out.push_back(k);
    return out;
  });
  def("values", {T::Hashmap}, T::Array, [](std::span<const Value> a) {
    if (!a[0].is_object()) throw EvaluationFault("values: expected an object");
    Value out = Value::array();
    for (const auto& [k, v] : a[0].items()) out.push_back(v);
    return out;
  });
  def("lookup", {T::Hashmap, T::String}, T::Number, [](std::span<const Value> a) {
    if (!a[0].is_object()) throw EvaluationFault("lookup: expected an object");
    const auto& key = string_arg(a[1], "lookup");
    auto it = a[0].find(key);
    if (it == a[0].end() || !it->is_number()) throw EvaluationFault("lookup: missing numeric key");
    return *it;
  });
  def("insert", {T::Hashmap, T::String, T::Number}, T::Hashmap, [](std::span<const Value> a) {
    if (!a[0].is_object()) throw EvaluationFault("insert: expected an object");
    number_arg(a[2], "insert");
    Value out = a[0];
    out[string_arg(a[1], "insert")] = a[2];
    return out;
  });

  def("lit_0", {}, T::Number, [](std::span<const Value>) { return Value(0); });
  def("lit_1", {}, T::Number, [](std::span<const Value>) { return Value(1); });
  def("lit_2", {}, T::Number, [](std::span<const Value>) { return Value(2); });
  def("lit_empty", {}, T::String, [](std::span<const Value>) { return Value(""); });
  return m;
}

}  // namespace detail

// Semantics for every instruction of default_catalog(), keyed by id.
inline const std::map<std::string, DslInstruction, std::less<>>& dsl_instructions() {
  static const auto table = detail::build_dsl();
  return table;
}

inline const DslInstruction* find_dsl_instruction(std::string_view id) {
  const auto& t = dsl_instructions();
  auto it = t.find(id);
  return it == t.end() ? nullptr : &it->second;
}

// --- programs --------------------------------------------------------------

struct ProgramNode;
using Program = std::shared_ptr<const ProgramNode>;

struct ProgramNode {
  enum class Kind { Input, Constant, Apply };
  Kind kind = Kind::Apply;
  std::size_t input_index = 0;  // Input
  Value constant;               // Constant
  std::string instruction;      // Apply; zero children for literals
  std::vector<Program> children;
  DataType type = DataType::String;
  std::size_t size = 1;
  std::size_t depth = 1;
};

inline Program make_input(std::size_t index, DataType type) {
  auto n = std::make_shared<ProgramNode>();
  n->kind = ProgramNode::Kind::Input;
  n->input_index = index;
  n->type = type;
  return n;
}

inline Program make_constant(Value v) {
  auto n = std::make_shared<ProgramNode>();
  n->kind = ProgramNode::Kind::Constant;
  n->type = type_of_value(v);
  n->constant = normalize_value(std::move(v));
  return n;
}

// Checks arity and positional types against the DSL.
inline Program make_apply(const std::string& id, std::vector<Program> children) {
  const auto* ins = find_dsl_instruction(id);
  if (!ins) throw UnknownInstruction(id);
  if (children.size() != ins->params.size())
    throw InvalidParameter("'" + id + "' expects " + std::to_string(ins->params.size()) + " arguments");
  auto n = std::make_shared<ProgramNode>();
  n->instruction = id;
  n->type = ins->result;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (children[i]->type != ins->params[i])
      throw InvalidParameter("'" + id + "' argument " + std::to_string(i) + " has the wrong type");
    n->size += children[i]->size;
    n->depth = std::max(n->depth, children[i]->depth + 1);
  }
  n->children = std::move(children);
  return n;
}

inline std::string to_sexpr(const ProgramNode& p) {
  switch (p.kind) {
    case ProgramNode::Kind::Input: return "x" + std::to_string(p.input_index);
    case ProgramNode::Kind::Constant: return p.constant.dump();
    case ProgramNode::Kind::Apply: break;
  }
  if (p.children.empty()) return p.instruction;
  std::string out = "(" + p.instruction;
  for (const auto& c : p.children) out += " " + to_sexpr(*c);
  return out + ")";
}

inline std::string to_sexpr(const Program& p) { return to_sexpr(*p); }

inline void collect_instructions(const ProgramNode& p, std::set<std::string>& out) {
  if (p.kind == ProgramNode::Kind::Apply) out.insert(p.instruction);
  for (const auto& c : p.children) collect_instructions(*c, out);
}

inline Value evaluate_program(const ProgramNode& p, std::span<const Value> inputs) {
  switch (p.kind) {
    case ProgramNode::Kind::Input:
      if (p.input_index >= inputs.size()) throw EvaluationFault("input x" + std::to_string(p.input_index) + " missing");
      return inputs[p.input_index];
    case ProgramNode::Kind::Constant: return p.constant;
    case ProgramNode::Kind::Apply: break;
  }
  const auto* ins = find_dsl_instruction(p.instruction);
  if (!ins) throw UnknownInstruction(p.instruction);
  std::vector<Value> args;
  args.reserve(p.children.size());
  for (const auto& c : p.children) args.push_back(evaluate_program(*c, inputs));
  return ins->eval(args);
}

inline Value evaluate_program(const Program& p, std::span<const Value> inputs) { return evaluate_program(*p, inputs); }

// --- search ----------------------------------------------------------------

struct SynthOptions {
  std::size_t max_depth = 4;
  std::size_t max_nodes = 7;
  std::size_t per_subset_budget = 20000;  // programs enumerated per subset
  unsigned threads = 1;
};

struct SynthStats {
  std::string family_key;
  std::size_t family_size = 0;
  std::size_t subsets_examined = 0;
  std::size_t subsets_skipped = 0;
  std::uint64_t programs_enumerated = 0;
  std::uint64_t evaluation_faults = 0;
  std::optional<std::size_t> solved_subset_index;  // position in the family
  InstructionSet solved_subset;
};

struct SynthResult {
  Program program;  // null when nothing was found
  SynthStats stats;
  bool found() const { return program != nullptr; }
};

namespace detail {

struct SubsetSearchResult {
  Program program;
  std::uint64_t enumerated = 0;
  std::uint64_t faults = 0;
};

// Scalar values appearing at top level in the cases, other than the values
// the pooled literal instructions already provide.
inline std::vector<Value> mined_constants(const std::vector<TestCase>& cases) {
  std::map<std::string, Value> found;
  auto consider = [&](const Value& v) {
    if (v.is_array() || v.is_object()) return;
    if (v == Value(0) || v == Value(1) || v == Value(2) || v == Value("")) return;
    found.emplace(v.dump(), v);
  };
  for (const auto& c : cases) {
    for (const auto& v : c.inputs) consider(v);
    consider(c.output);
  }
  std::vector<Value> out;
  for (auto& [k, v] : found) out.push_back(v);
  return out;
}

class SubsetSearch {
 public:
  SubsetSearch(const std::vector<TestCase>& cases, const std::vector<DataType>& input_types,
               const std::vector<Value>& constants, const InstructionSet& subset, const SynthOptions& opt)
      : cases_(cases), input_types_(input_types), constants_(constants), opt_(opt) {
    for (const auto& id : subset)
      if (const auto* ins = find_dsl_instruction(id)) instructions_.push_back(ins);
    for (const auto& c : cases_) target_.push_back(c.output);
  }

  SubsetSearchResult run() {
    bank_.assign(opt_.max_nodes + 1, {});
    for (std::size_t size = 1; size <= opt_.max_nodes; ++size) {
      if (size == 1) {
        for (std::size_t i = 0; i < input_types_.size(); ++i) {
          if (offer(make_input(i, input_types_[i]), nullptr)) return done();
          if (exhausted()) return done();
        }
      }
      for (const auto* ins : instructions_) {
        if (ins->params.empty()) {
          if (size != 1) continue;
          if (offer(make_apply(ins->id, {}), ins)) return done();
          if (exhausted()) return done();
          continue;
        }
        if (size < ins->params.size() + 1) continue;
        std::vector<std::size_t> parts(ins->params.size());
        if (compose(ins, size - 1, 0, parts)) return done();
        if (exhausted()) return done();
      }
      if (size == 1) {
        for (const auto& v : constants_) {
          if (offer(make_constant(v), nullptr)) return done();
          if (exhausted()) return done();
        }
      }
    }
    return done();
  }

 private:
  struct Entry {
    Program program;
    std::vector<Value> outputs;
  };

  bool exhausted() const { return result_.enumerated >= opt_.per_subset_budget; }

  SubsetSearchResult done() { return std::move(result_); }

  // Splits `remaining` nodes over parameters [pos, end) and enumerates the
  // child tuples for each split. Returns true once a solution is found.
  bool compose(const DslInstruction* ins, std::size_t remaining, std::size_t pos, std::vector<std::size_t>& parts) {
    const std::size_t left = ins->params.size() - pos;
    if (left == 1) {
      parts[pos] = remaining;
      std::vector<const Entry*> chosen(ins->params.size());
      return product(ins, parts, 0, chosen);
    }
    for (std::size_t take = 1; take + (left - 1) <= remaining; ++take) {
      parts[pos] = take;
      if (compose(ins, remaining - take, pos + 1, parts)) return true;
      if (exhausted()) return false;
    }
    return false;
  }

  bool product(const DslInstruction* ins, const std::vector<std::size_t>& parts, std::size_t pos,
               std::vector<const Entry*>& chosen) {
    if (pos == parts.size()) return apply(ins, chosen);
    if (parts[pos] >= bank_.size()) return false;
    const auto& pool = bank_[parts[pos]][static_cast<int>(ins->params[pos])];
    for (const auto& e : pool) {
      chosen[pos] = &e;
      if (product(ins, parts, pos + 1, chosen)) return true;
      if (exhausted()) return false;
    }
    return false;
  }

  bool apply(const DslInstruction* ins, const std::vector<const Entry*>& chosen) {
    std::size_t depth = 0;
    for (const auto* c : chosen) depth = std::max(depth, c->program->depth);
    if (depth + 1 > opt_.max_depth) return false;

    ++result_.enumerated;
    std::vector<Value> outputs;
    outputs.reserve(cases_.size());
    std::vector<Value> args(chosen.size());
    try {
      for (std::size_t k = 0; k < cases_.size(); ++k) {
        for (std::size_t i = 0; i < chosen.size(); ++i) args[i] = chosen[i]->outputs[k];
        outputs.push_back(ins->eval(args));
      }
    } catch (const EvaluationFault&) {
      ++result_.faults;
      return false;
    }
    std::vector<Program> kids;
    kids.reserve(chosen.size());
    for (const auto* c : chosen) kids.push_back(c->program);
    return record(make_apply(ins->id, std::move(kids)), std::move(outputs));
  }

  // Leaves: inputs, literal instructions and mined constants.
  bool offer(Program leaf, const DslInstruction* literal) {
    ++result_.enumerated;
    std::vector<Value> outputs;
    outputs.reserve(cases_.size());
    try {
      for (const auto& c : cases_) {
        if (literal) outputs.push_back(literal->eval({}));
        else outputs.push_back(evaluate_program(*leaf, c.inputs));
      }
    } catch (const EvaluationFault&) {
      ++result_.faults;
      return false;
    }
    return record(std::move(leaf), std::move(outputs));
  }

  // Adds the candidate unless an observationally equivalent one exists.
  bool record(Program p, std::vector<Value> outputs) {
    std::string key;
    for (const auto& v : outputs) {
      key += v.dump();
      key += '\x1f';
    }
    const int type = static_cast<int>(p->type);
    if (!seen_[type].insert(std::move(key)).second) return false;
    if (outputs == target_) {
      result_.program = p;
      return true;
    }
    bank_[p->size][type].push_back({std::move(p), std::move(outputs)});
    return false;
  }

  const std::vector<TestCase>& cases_;
  const std::vector<DataType>& input_types_;
  const std::vector<Value>& constants_;
  const SynthOptions& opt_;
  std::vector<const DslInstruction*> instructions_;
  std::vector<Value> target_;
  std::vector<std::array<std::vector<Entry>, 4>> bank_;
  std::array<std::unordered_set<std::string>, 4> seen_;
  SubsetSearchResult result_;
};

inline std::vector<DataType> positional_input_types(const std::vector<TestCase>& cases) {
  std::vector<DataType> types;
  for (const auto& v : cases.front().inputs) types.push_back(type_of_value(v));
  for (const auto& c : cases)
    for (std::size_t i = 0; i < types.size(); ++i)
      if (type_of_value(c.inputs[i]) != types[i])
        throw InconsistentInputTypes("input x" + std::to_string(i) + " changes type between test cases");
  return types;
}

}  // namespace detail

// Searches the subsets of the selected family in family order and returns
// the first solution; subsets that cannot serve the test-case signature are
// skipped. With threads > 1 subsets are searched concurrently, but the result
// and statistics are those of the sequential scan.
inline SynthResult synthesize(const std::vector<TestCase>& cases, const FamilyAtlas& atlas, const Catalog& cat,
                              const SynthOptions& opt = {}) {
  if (opt.max_nodes == 0 || opt.max_depth == 0 || opt.per_subset_budget == 0)
    throw InvalidParameter("search budgets must be positive");
  if (!atlas.provenance.catalog_hash.empty() && atlas.provenance.catalog_hash != catalog_fingerprint(cat))
    throw ProvenanceMismatch("atlas was built with a different catalog");

  std::vector<TestCase> normalized = cases;
  for (auto& c : normalized) {
    for (auto& v : c.inputs) v = normalize_value(v);
    c.output = normalize_value(c.output);
  }
  const auto sig = infer_signature(normalized);
  const auto input_types = detail::positional_input_types(normalized);
  const auto constants = detail::mined_constants(normalized);
  const Family& family = select_family(atlas, sig);

  const auto n = family.subsets.size();
  std::vector<char> servable(n);
  for (std::size_t i = 0; i < n; ++i) servable[i] = subset_can_serve(family.subsets[i].instructions, sig, cat);

  std::vector<std::optional<detail::SubsetSearchResult>> results(n);
  std::atomic<std::size_t> first_found{n};
  detail::parallel_for(n, opt.threads, [&](std::size_t i) {
    if (!servable[i] || i > first_found.load()) return;
    detail::SubsetSearch search(normalized, input_types, constants, family.subsets[i].instructions, opt);
    results[i] = search.run();
    if (results[i]->program) {
      auto cur = first_found.load();
      while (i < cur && !first_found.compare_exchange_weak(cur, i)) {
      }
    }
  });

  SynthResult out;
  out.stats.family_key = family.key;
  out.stats.family_size = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!servable[i]) {
      ++out.stats.subsets_skipped;
      continue;
    }
    const auto& r = *results[i];
    ++out.stats.subsets_examined;
    out.stats.programs_enumerated += r.enumerated;
    out.stats.evaluation_faults += r.faults;
    if (r.program) {
      out.program = r.program;
      out.stats.solved_subset_index = i;
      out.stats.solved_subset = family.subsets[i].instructions;
      break;
    }
  }
  return out;
}

inline nlohmann::json synth_result_json(const SynthResult& r) {
  nlohmann::json stats = {{"family_key", r.stats.family_key},
                          {"family_size", r.stats.family_size},
                          {"subsets_examined", r.stats.subsets_examined},
                          {"subsets_skipped", r.stats.subsets_skipped},
                          {"programs_enumerated", r.stats.programs_enumerated},
                          {"evaluation_faults", r.stats.evaluation_faults}};
  if (r.stats.solved_subset_index) {
    stats["solved_subset_index"] = *r.stats.solved_subset_index;
    stats["solved_subset"] = r.stats.solved_subset;
  }
  nlohmann::json out = {{"status", r.found() ? "found" : "not_found"}, {"stats", std::move(stats)}};
  if (r.found()) out["program"] = to_sexpr(r.program);
  return out;
}

}  // namespace tsis
