#include "compparse/serialize.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace compparse {

namespace {

static_assert(std::endian::native == std::endian::little, "model files assume little-endian hosts");

class Writer {
 public:
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void i32(std::int32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::int32_t i32() { return get<std::int32_t>(); }
  double f64() { return get<double>(); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw std::runtime_error("model file truncated");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const ParserModel& model) {
  Writer w;
  w.raw(kModelMagic, 8);
  w.u32(kModelVersion);
  const auto kv = model.config().to_map();
  w.u32(static_cast<std::uint32_t>(kv.size()));
  for (const auto& [k, v] : kv) {
    w.str(k);
    w.str(v);
  }
  const auto& vocab = model.vocab();
  w.u32(static_cast<std::uint32_t>(vocab.words().size()));
  for (std::size_t i = 0; i < vocab.words().size(); ++i) {
    w.str(vocab.words()[i]);
    w.i32(vocab.frequencies()[i]);
  }
  w.u32(static_cast<std::uint32_t>(vocab.tags().size()));
  for (const auto& t : vocab.tags()) w.str(t);
  w.u32(static_cast<std::uint32_t>(vocab.chars().size()));
  for (char32_t c : vocab.chars()) w.u32(static_cast<std::uint32_t>(c));
  w.u32(static_cast<std::uint32_t>(vocab.labels().size()));
  for (const auto& l : vocab.labels()) w.str(l);

  w.u32(static_cast<std::uint32_t>(model.store().size()));
  for (const auto& p : model.store()) {
    w.str(p->name());
    w.u32(static_cast<std::uint32_t>(p->rows()));
    w.u32(static_cast<std::uint32_t>(p->cols()));
    w.raw(p->value().data(), sizeof(double) * static_cast<std::size_t>(p->value().size()));
  }
  return w.take();
}

ParserModel deserialize_model(const std::string& bytes) {
  Reader r(bytes);
  if (r.bytes(8) != std::string(kModelMagic, 8)) throw std::runtime_error("not a model file");
  if (const auto v = r.u32(); v != kModelVersion)
    throw std::runtime_error("unsupported model version " + std::to_string(v));
  std::map<std::string, std::string> kv;
  for (auto k = r.u32(); k > 0; --k) {
    auto key = r.str();
    kv[key] = r.str();
  }
  const auto cfg = ReprConfig::from_map(kv);

  std::vector<std::string> words;
  std::vector<int> freqs;
  for (auto n = r.u32(); n > 0; --n) {
    words.push_back(r.str());
    freqs.push_back(r.i32());
  }
  std::vector<std::string> tags;
  for (auto n = r.u32(); n > 0; --n) tags.push_back(r.str());
  std::vector<char32_t> chars;
  for (auto n = r.u32(); n > 0; --n) chars.push_back(static_cast<char32_t>(r.u32()));
  std::vector<std::string> labels;
  for (auto n = r.u32(); n > 0; --n) labels.push_back(r.str());
  auto vocab = Vocabulary::from_tables(std::move(words), std::move(freqs), std::move(tags),
                                       std::move(chars), std::move(labels));

  ad::ParameterStore store;
  for (auto n = r.u32(); n > 0; --n) {
    auto name = r.str();
    const auto rows = r.u32(), cols = r.u32();
    ad::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
    store.add(name, std::move(m));
  }
  if (!r.done()) throw std::runtime_error("trailing bytes in model file");
  return ParserModel(cfg, std::move(vocab), std::move(store));
}

void save_model(const ParserModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParserModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace compparse
