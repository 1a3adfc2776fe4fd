#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/learners/bagging.hpp"

namespace droughtens::learners {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string num(double v) { return std::isnan(v) ? "nan" : text::format_double(v); }

template <class T>
void put_list(std::ostream& out, std::string_view key, const std::vector<T>& values) {
  out << key << ' ' << values.size();
  for (const auto& v : values) {
    if constexpr (std::is_floating_point_v<T>) out << ' ' << num(v);
    else out << ' ' << v;
  }
  out << '\n';
}

// Whitespace-token reader with keyed expectations.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("model file truncated");
    return w;
  }
  void expect(std::string_view key) {
    const auto w = word();
    if (w != key) throw DataError("model file: expected '" + std::string(key) + "', found '" + w + "'");
  }
  double number() {
    const auto w = word();
    if (w == "nan") return kMissing;
    double v = 0.0;
    if (!text::parse_double(w, v)) throw DataError("model file: bad number '" + w + "'");
    return v;
  }
  std::size_t count() {
    const double v = number();
    if (!(v >= 0) || v != std::floor(v)) throw DataError("model file: bad count");
    return static_cast<std::size_t>(v);
  }
  std::vector<double> numbers(std::string_view key) {
    expect(key);
    std::vector<double> v(count());
    for (auto& x : v) x = number();
    return v;
  }
  std::vector<std::string> words(std::string_view key) {
    expect(key);
    std::vector<std::string> v(count());
    for (auto& x : v) x = word();
    return v;
  }
  std::string rest_of_line() {
    std::string line;
    std::getline(in_, line);
    return std::string(text::trim(line));
  }

 private:
  std::istream& in_;
};

}  // namespace detail

inline void write_model(const BaggedModel& m, std::ostream& out) {
  using detail::num;
  out << "droughtens-model " << kModelFormatVersion << '\n';
  out << "formula_id " << m.formula_id << '\n';
  out << "formula " << m.formula << '\n';
  out << "technique " << to_string(m.technique) << '\n';
  detail::put_list(out, "features", m.features);
  out << "train_r2 " << num(m.train_r2) << '\n';
  out << "validation_r2 " << num(m.validation_r2) << '\n';
  out << "overfit_index " << num(m.overfit_index) << '\n';
  detail::put_list(out, "oof", m.oof);
  out << "replicates " << m.replicates.size() << '\n';
  for (const auto& r : m.replicates) {
    detail::put_list(out, "scaler_min", r.scaler.min);
    detail::put_list(out, "scaler_max", r.scaler.max);
    out << "target_range " << num(r.scaler.target_min) << ' ' << num(r.scaler.target_max) << '\n';
    out << "fold_r2 " << num(r.train_r2) << ' ' << num(r.validation_r2) << '\n';
    if (r.ann) {
      detail::put_list(out, "ann_layers", r.ann->layers);
      detail::put_list(out, "ann_weights", r.ann->weights);
    } else {
      const auto& s = *r.svr;
      out << "svr " << s.dim << ' ' << num(s.gamma) << ' ' << num(s.cost) << ' ' << num(s.epsilon) << ' '
          << num(s.bias) << ' ' << (r.svr_scaled_target ? 1 : 0) << '\n';
      detail::put_list(out, "svr_coef", s.coef);
      detail::put_list(out, "svr_support", s.support);
    }
  }
  out << "end\n";
}

inline BaggedModel read_model(std::istream& in) {
  detail::TokenReader t(in);
  t.expect("droughtens-model");
  if (t.count() != kModelFormatVersion) throw DataError("unsupported model file version");
  BaggedModel m;
  t.expect("formula_id");
  m.formula_id = t.word();
  t.expect("formula");
  m.formula = t.rest_of_line();
  t.expect("technique");
  m.technique = parse_technique(t.word());
  m.features = t.words("features");
  t.expect("train_r2");
  m.train_r2 = t.number();
  t.expect("validation_r2");
  m.validation_r2 = t.number();
  t.expect("overfit_index");
  m.overfit_index = t.number();
  m.oof = t.numbers("oof");
  t.expect("replicates");
  m.replicates.resize(t.count());
  for (auto& r : m.replicates) {
    r.scaler.min = t.numbers("scaler_min");
    r.scaler.max = t.numbers("scaler_max");
    t.expect("target_range");
    r.scaler.target_min = t.number();
    r.scaler.target_max = t.number();
    t.expect("fold_r2");
    r.train_r2 = t.number();
    r.validation_r2 = t.number();
    if (r.scaler.min.size() != m.features.size() || r.scaler.max.size() != m.features.size()) {
      throw DataError("model file: scaler width does not match features");
    }
    if (m.technique == Technique::Ann) {
      AnnParams p;
      for (double v : t.numbers("ann_layers")) p.layers.push_back(static_cast<int>(v));
      p.weights = t.numbers("ann_weights");
      if (p.layers.size() < 2 || p.weights.size() != AnnParams::weight_count(p.layers)) {
        throw DataError("model file: ANN weights do not match layers");
      }
      r.ann = std::move(p);
    } else {
      SvrParams p;
      t.expect("svr");
      p.dim = t.count();
      p.gamma = t.number();
      p.cost = t.number();
      p.epsilon = t.number();
      p.bias = t.number();
      r.svr_scaled_target = t.count() != 0;
      p.coef = t.numbers("svr_coef");
      p.support = t.numbers("svr_support");
      if (p.support.size() != p.coef.size() * p.dim) throw DataError("model file: SVR support size mismatch");
      r.svr = std::move(p);
    }
  }
  t.expect("end");
  return m;
}

inline std::string model_file_name(const BaggedModel& m) {
  return m.formula_id + "." + std::string(to_string(m.technique)) + ".model";
}

inline void save_model(const BaggedModel& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / model_file_name(m));
  if (!out) throw DataError("cannot write model file in " + dir.string());
  write_model(m, out);
}

inline BaggedModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open model file " + file.string());
  try {
    return read_model(in);
  } catch (const DataError& e) {
    throw DataError(file.filename().string() + ": " + e.what());
  }
}

// Registry listing one line per saved model.
inline void write_registry(const std::vector<BaggedModel>& models, std::ostream& out) {
  out << "formula_id,technique,predictors,train_r2,validation_r2,overfit_index,file,formula\n";
  for (const auto& m : models) {
    out << m.formula_id << ',' << to_string(m.technique) << ',' << m.features.size() << ','
        << detail::num(m.train_r2) << ',' << detail::num(m.validation_r2) << ',' << detail::num(m.overfit_index)
        << ',' << model_file_name(m) << ',' << m.formula << '\n';
  }
}

inline std::vector<BaggedModel> load_models(const std::filesystem::path& dir) {
  std::ifstream reg(dir / "index.csv");
  if (!reg) throw DataError("model registry missing in " + dir.string());
  std::string line;
  std::getline(reg, line);
  std::vector<BaggedModel> out;
  while (std::getline(reg, line)) {
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() < 8) throw DataError("malformed registry line: " + line);
    out.push_back(load_model(dir / std::string(f[6])));
  }
  return out;
}

inline void save_models(const std::vector<BaggedModel>& models, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& m : models) save_model(m, dir);
  std::ofstream reg(dir / "index.csv");
  write_registry(models, reg);
}

}  // namespace droughtens::learners
