#pragma once

// Structural description of a design's JSON form: field types, required and
// optional keys, nested lists and maps. Used for the parse-stage type check,
// for unknown-key detection, and to render the schema shown to agents.

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace invdes {

using json = nlohmann::json;

class Shape {
 public:
  enum class Kind { Number, Integer, String, Array, Object, Map };

  struct Field {
    std::string name;
    std::shared_ptr<const Shape> shape;
    bool required = true;
    std::string doc;
  };

  static Shape number(std::string doc = {});
  static Shape integer(std::string doc = {});
  static Shape string(std::string doc = {});
  static Shape array(Shape element, std::string doc = {});
  static Shape map(Shape value, std::string doc = {});
  static Shape object(std::vector<Field> fields, std::string doc = {});

  static Field req(std::string name, Shape s, std::string doc = {});
  static Field opt(std::string name, Shape s, std::string doc = {});

  Kind kind() const { return kind_; }
  const std::vector<Field>& fields() const { return fields_; }
  const Shape* element() const { return element_.get(); }

  /// Type errors (wrong JSON type, missing required key). Messages are
  /// prefixed with the dotted path.
  std::vector<std::string> type_errors(const json& value, const std::string& path = "") const;

  /// Keys present in `value` that the shape does not declare.
  std::vector<std::string> unknown_keys(const json& value, const std::string& path = "") const;

  /// JSON-Schema style rendering.
  json to_schema() const;

 private:
  Kind kind_ = Kind::Number;
  std::vector<Field> fields_;
  std::shared_ptr<const Shape> element_;
  std::string doc_;
};

}  // namespace invdes
