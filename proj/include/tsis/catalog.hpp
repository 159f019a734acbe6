#pragma once

// Instruction catalog: each instruction id with the flat set of types it
// consumes and the set of types it produces.

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsis/error.hpp"
#include "tsis/instruction_set.hpp"
#include "tsis/typesig.hpp"

namespace tsis {

struct InstructionSpec {
  std::string id;
  TypeSet input_types;   // empty for constant producers
  TypeSet output_types;  // never empty

  TypeSignature signature() const { return {input_types, output_types}; }
};

class Catalog {
 public:
  Catalog() = default;

  // Validates uniqueness and non-empty outputs; sorts by id.
  Catalog(std::string name, std::string version, std::vector<InstructionSpec> specs)
      : name_(std::move(name)), version_(std::move(version)), specs_(std::move(specs)) {
    std::sort(specs_.begin(), specs_.end(),
              [](const InstructionSpec& a, const InstructionSpec& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      if (specs_[i].id.empty()) throw CatalogParseError("instruction with empty id");
      if (i > 0 && specs_[i].id == specs_[i - 1].id) throw DuplicateInstruction(specs_[i].id);
      if (specs_[i].output_types.empty()) throw EmptyOutputTypes(specs_[i].id);
    }
  }

  const std::string& name() const { return name_; }
  const std::string& version() const { return version_; }
  const std::vector<InstructionSpec>& instructions() const { return specs_; }
  std::size_t size() const { return specs_.size(); }

  const InstructionSpec* find(std::string_view id) const {
    auto it = std::lower_bound(specs_.begin(), specs_.end(), id,
                               [](const InstructionSpec& s, std::string_view k) { return s.id < k; });
    return (it != specs_.end() && it->id == id) ? &*it : nullptr;
  }

  const InstructionSpec& at(std::string_view id) const {
    if (const auto* s = find(id)) return *s;
    throw UnknownInstruction(std::string(id));
  }

  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& s : specs_) out.push_back(s.id);
    return out;
  }

 private:
  std::string name_;
  std::string version_;
  std::vector<InstructionSpec> specs_;
};

namespace detail {

inline TypeSet parse_type_list(const nlohmann::json& arr, const std::string& id) {
  if (!arr.is_array()) throw CatalogParseError("instruction '" + id + "': type list is not an array");
  TypeSet set;
  for (const auto& tag : arr) {
    if (!tag.is_string() || tag.get_ref<const std::string&>().size() != 1)
      throw CatalogParseError("instruction '" + id + "': type tags must be one of a/h/n/s");
    auto t = data_type_from_tag(tag.get_ref<const std::string&>()[0]);
    if (!t) throw CatalogParseError("instruction '" + id + "': unknown type tag " + tag.dump());
    set.insert(*t);
  }
  return set;
}

inline nlohmann::json type_list_json(TypeSet set) {
  auto arr = nlohmann::json::array();
  for (char c : set.tags()) arr.push_back(std::string(1, c));
  return arr;
}

}  // namespace detail

inline Catalog catalog_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw CatalogParseError("catalog must be a JSON object");
  if (!doc.contains("instructions") || !doc["instructions"].is_array())
    throw CatalogParseError("catalog needs an 'instructions' array");
  auto text_field = [&](const char* key) -> std::string {
    if (!doc.contains(key)) return {};
    if (!doc[key].is_string()) throw CatalogParseError(std::string("'") + key + "' must be a string");
    return doc[key].get<std::string>();
  };

  std::vector<InstructionSpec> specs;
  for (const auto& entry : doc["instructions"]) {
    if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string())
      throw CatalogParseError("instruction entries need a string 'id'");
    const auto id = entry["id"].get<std::string>();
    if (!entry.contains("inputs") || !entry.contains("outputs"))
      throw CatalogParseError("instruction '" + id + "' needs 'inputs' and 'outputs'");
    specs.push_back({id, detail::parse_type_list(entry["inputs"], id),
                     detail::parse_type_list(entry["outputs"], id)});
  }
  return Catalog(text_field("name"), text_field("version"), std::move(specs));
}

inline nlohmann::json catalog_to_json(const Catalog& cat) {
  auto list = nlohmann::json::array();
  for (const auto& s : cat.instructions())
    list.push_back({{"id", s.id},
                    {"inputs", detail::type_list_json(s.input_types)},
                    {"outputs", detail::type_list_json(s.output_types)}});
  return {{"name", cat.name()}, {"version", cat.version()}, {"instructions", std::move(list)}};
}

inline Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogParseError("cannot open catalog file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw CatalogParseError("catalog '" + path + "': " + e.what());
  }
  return catalog_from_json(doc);
}

// Union of input types and union of output types over `ids`.
template <typename Ids>
TypeSignature subset_signature(const Ids& ids, const Catalog& cat) {
  TypeSignature sig;
  for (const auto& id : ids) {
    const auto& spec = cat.at(id);
    sig.inputs |= spec.input_types;
    sig.outputs |= spec.output_types;
  }
  return sig;
}

// Boundary-type check used to skip subsets during synthesis: each required
// output type is produced, and each required input type is consumed, by at
// least one instruction of the subset.
template <typename Ids>
bool subset_can_serve(const Ids& ids, const TypeSignature& tc_sig, const Catalog& cat) {
  return subsumes(subset_signature(ids, cat), tc_sig);
}

// The bundled toy instruction set. Every id here has executable semantics in
// the synthesizer's DSL.
inline Catalog default_catalog() {
  using T = DataType;
  auto spec = [](const char* id, TypeSet in, TypeSet out) { return InstructionSpec{id, in, out}; };
  return Catalog(
      "toy-dsl", "1",
      {
          spec("add", {T::Number}, {T::Number}),
          spec("sub", {T::Number}, {T::Number}),
          spec("mul", {T::Number}, {T::Number}),
          spec("div", {T::Number}, {T::Number}),
          spec("concat", {T::String}, {T::String}),
          spec("upper", {T::String}, {T::String}),
          spec("strlen", {T::String}, {T::Number}),
          spec("to_str", {T::Number}, {T::String}),
          spec("length", {T::Array}, {T::Number}),
          spec("get", {T::Array, T::Number}, {T::Number}),
          spec("append", {T::Array, T::Number}, {T::Array}),
          spec("sum", {T::Array}, {T::Number}),
          spec("reverse", {T::Array}, {T::Array}),
          spec("sort", {T::Array}, {T::Array}),
          spec("split", {T::String}, {T::Array}),
          spec("join", {T::Array, T::String}, {T::String}),
          spec("keys", {T::Hashmap}, {T::Array}),
          spec("values", {T::Hashmap}, {T::Array}),
          spec("lookup", {T::Hashmap, T::String}, {T::Number}),
          spec("insert", {T::Hashmap, T::Number, T::String}, {T::Hashmap}),
          spec("lit_0", {}, {T::Number}),
          spec("lit_1", {}, {T::Number}),
          spec("lit_2", {}, {T::Number}),
          spec("lit_empty", {}, {T::String}),
      });
}

}  // namespace tsis
