#include "invdes/shape.hpp"

#include <cmath>

namespace invdes {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const char* kind_name(Shape::Kind k) {
  switch (k) {
    case Shape::Kind::Number: return "number";
    case Shape::Kind::Integer: return "integer";
    case Shape::Kind::String: return "string";
    case Shape::Kind::Array: return "array";
    case Shape::Kind::Object: return "object";
    case Shape::Kind::Map: return "object";
  }
  return "?";
}

bool is_integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d);
}

}  // namespace

Shape Shape::number(std::string doc) {
  Shape s;
  s.kind_ = Kind::Number;
  s.doc_ = std::move(doc);
  return s;
}

Shape Shape::integer(std::string doc) {
  Shape s;
  s.kind_ = Kind::Integer;
  s.doc_ = std::move(doc);
  return s;
}

Shape Shape::string(std::string doc) {
  Shape s;
  s.kind_ = Kind::String;
  s.doc_ = std::move(doc);
  return s;
}

Shape Shape::array(Shape element, std::string doc) {
  Shape s;
  s.kind_ = Kind::Array;
  s.element_ = std::make_shared<const Shape>(std::move(element));
  s.doc_ = std::move(doc);
  return s;
}

Shape Shape::map(Shape value, std::string doc) {
  Shape s;
  s.kind_ = Kind::Map;
  s.element_ = std::make_shared<const Shape>(std::move(value));
  s.doc_ = std::move(doc);
  return s;
}

Shape Shape::object(std::vector<Field> fields, std::string doc) {
  Shape s;
  s.kind_ = Kind::Object;
  s.fields_ = std::move(fields);
  s.doc_ = std::move(doc);
  return s;
}

Shape::Field Shape::req(std::string name, Shape s, std::string doc) {
  return {std::move(name), std::make_shared<const Shape>(std::move(s)), true, std::move(doc)};
}

Shape::Field Shape::opt(std::string name, Shape s, std::string doc) {
  return {std::move(name), std::make_shared<const Shape>(std::move(s)), false, std::move(doc)};
}

std::vector<std::string> Shape::type_errors(const json& v, const std::string& path) const {
  const std::string where = path.empty() ? "design" : path;
  auto mismatch = [&] {
    return std::vector<std::string>{where + ": expected " + kind_name(kind_)};
  };
  switch (kind_) {
    case Kind::Number:
      if (!v.is_number() || !std::isfinite(v.get<double>())) return mismatch();
      return {};
    case Kind::Integer:
      if (!is_integral(v)) return mismatch();
      return {};
    case Kind::String:
      if (!v.is_string()) return mismatch();
      return {};
    case Kind::Array: {
      if (!v.is_array()) return mismatch();
      std::vector<std::string> out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto sub = element_->type_errors(v[i], path + "[" + std::to_string(i) + "]");
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    case Kind::Map: {
      if (!v.is_object()) return mismatch();
      std::vector<std::string> out;
      for (auto it = v.begin(); it != v.end(); ++it) {
        auto sub = element_->type_errors(it.value(), join(path, it.key()));
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    case Kind::Object: {
      if (!v.is_object()) return mismatch();
      std::vector<std::string> out;
      for (const auto& f : fields_) {
        if (!v.contains(f.name)) {
          if (f.required) out.push_back(join(path, f.name) + ": required field is missing");
          continue;
        }
        auto sub = f.shape->type_errors(v.at(f.name), join(path, f.name));
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
  }
  return {};
}

std::vector<std::string> Shape::unknown_keys(const json& v, const std::string& path) const {
  std::vector<std::string> out;
  if (kind_ == Kind::Object && v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      const Field* match = nullptr;
      for (const auto& f : fields_) {
        if (f.name == it.key()) match = &f;
      }
      if (!match) {
        out.push_back(join(path, it.key()));
        continue;
      }
      auto sub = match->shape->unknown_keys(it.value(), join(path, it.key()));
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else if (kind_ == Kind::Array && v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto sub = element_->unknown_keys(v[i], path + "[" + std::to_string(i) + "]");
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else if (kind_ == Kind::Map && v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      auto sub = element_->unknown_keys(it.value(), join(path, it.key()));
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

json Shape::to_schema() const {
  json s;
  switch (kind_) {
    case Kind::Number: s["type"] = "number"; break;
    case Kind::Integer: s["type"] = "integer"; break;
    case Kind::String: s["type"] = "string"; break;
    case Kind::Array:
      s["type"] = "array";
      s["items"] = element_->to_schema();
      break;
    case Kind::Map:
      s["type"] = "object";
      s["additionalProperties"] = element_->to_schema();
      break;
    case Kind::Object: {
      s["type"] = "object";
      json props = json::object();
      json required = json::array();
      for (const auto& f : fields_) {
        json p = f.shape->to_schema();
        if (!f.doc.empty()) p["description"] = f.doc;
        props[f.name] = p;
        if (f.required) required.push_back(f.name);
      }
      s["properties"] = props;
      s["required"] = required;
      s["additionalProperties"] = false;
      break;
    }
  }
  if (!doc_.empty()) s["description"] = doc_;
  return s;
}

}  // namespace invdes
