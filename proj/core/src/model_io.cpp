#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "l2g/error.hpp"
#include "l2g/goalgen.hpp"

namespace l2g {

namespace {

static_assert(std::endian::native == std::endian::little, "serializer assumes a little-endian host");

constexpr std::array<char, 4> kMagic{'C', 'V', 'A', 'E'};
constexpr std::size_t kHeaderSize = 4 + 1 + 4;
constexpr std::uint8_t kDtypeF64 = 1;
constexpr std::uint8_t kDtypeU64 = 2;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  void section(const std::string& name, std::uint8_t dtype, const std::vector<std::uint64_t>& dims,
               const void* values, std::size_t value_bytes) {
    put(static_cast<std::uint32_t>(name.size()));
    put_bytes(name.data(), name.size());
    put(dtype);
    put(static_cast<std::uint8_t>(dims.size()));
    for (auto d : dims) put(d);
    put_bytes(values, value_bytes);
    ++sections_;
  }
  std::vector<std::uint8_t> finish() {
    std::vector<std::uint8_t> payload;
    const auto n = sections_;
    payload.resize(sizeof(n));
    std::memcpy(payload.data(), &n, sizeof(n));
    payload.insert(payload.end(), bytes_.begin(), bytes_.end());
    return payload;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint32_t sections_ = 0;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void get_bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kBadFormat, "payload ends early");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Section {
  std::uint8_t dtype;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint8_t> raw;

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

std::uint32_t crc_of(std::span<const std::uint8_t> payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < payload.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(payload.size() - pos, 1U << 30));
    crc = crc32(crc, payload.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> serialize(const CVAEModel& model) {
  const auto& hp = model.hyperparams();
  Writer w;
  const std::vector<std::uint64_t> ints{hp.hidden, hp.latent, hp.embed, hp.batch, hp.epochs,
                                        hp.seed,   model.vocabulary().size(),
                                        static_cast<std::uint64_t>(hp.reconstruction)};
  w.section("hparams.int", kDtypeU64, {ints.size()}, ints.data(), ints.size() * sizeof(std::uint64_t));
  const std::vector<double> reals{hp.beta, hp.lr};
  w.section("hparams.real", kDtypeF64, {reals.size()}, reals.data(), reals.size() * sizeof(double));
  for (const auto& p : model.params()) {
    std::vector<std::uint64_t> dims(p.value.shape().begin(), p.value.shape().end());
    w.section(p.name, kDtypeF64, dims, p.value.data(), p.value.size() * sizeof(double));
  }
  const auto payload = w.finish();

  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(kModelFormatVersion);
  const std::uint32_t crc = crc_of(payload);
  const auto* c = reinterpret_cast<const std::uint8_t*>(&crc);
  out.insert(out.end(), c, c + sizeof(crc));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

CVAEModel deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::kChecksumMismatch, "file shorter than its header");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadFormat, "missing CVAE magic");
  }
  if (bytes[4] != kModelFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "version " + std::to_string(bytes[4]) + ", supported " +
                    std::to_string(kModelFormatVersion));
  }
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + 5, sizeof(stored));
  const auto payload = bytes.subspan(kHeaderSize);
  if (crc_of(payload) != stored) throw Error(ErrorCode::kChecksumMismatch, "payload CRC32 differs");

  Reader r(payload);
  const auto count = r.get<std::uint32_t>();
  std::vector<std::pair<std::string, Section>> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name = r.get_string(r.get<std::uint32_t>());
    Section s;
    s.dtype = r.get<std::uint8_t>();
    if (s.dtype != kDtypeF64 && s.dtype != kDtypeU64) {
      throw Error(ErrorCode::kBadFormat, "unknown dtype in section " + name);
    }
    const auto rank = r.get<std::uint8_t>();
    // Dims come from the file: bound them by the bytes actually present
    // before allocating.
    std::uint64_t elems = 1;
    for (int k = 0; k < rank; ++k) {
      const auto d = r.get<std::uint64_t>();
      if (d != 0 && elems > r.remaining() / 8 / d) {
        throw Error(ErrorCode::kBadFormat, "section " + name + " larger than the file");
      }
      elems *= d;
      s.dims.push_back(d);
    }
    if (elems * 8 > r.remaining()) throw Error(ErrorCode::kBadFormat, "section " + name + " larger than the file");
    s.raw.resize(elems * 8);
    r.get_bytes(s.raw.data(), s.raw.size());
    sections.emplace_back(name, std::move(s));
  }
  if (!r.done()) throw Error(ErrorCode::kBadFormat, "trailing bytes after sections");

  const auto& names = cvae_param_names();
  if (sections.size() != 2 + names.size()) {
    throw Error(ErrorCode::kBadFormat, "expected " + std::to_string(2 + names.size()) + " sections");
  }
  auto expect = [&](std::size_t i, const std::string& name, std::uint8_t dtype) -> const Section& {
    if (sections[i].first != name || sections[i].second.dtype != dtype) {
      throw Error(ErrorCode::kBadFormat, "section " + std::to_string(i) + " is '" +
                                             sections[i].first + "', expected '" + name + "'");
    }
    return sections[i].second;
  };

  const auto& ints_sec = expect(0, "hparams.int", kDtypeU64);
  const auto& reals_sec = expect(1, "hparams.real", kDtypeF64);
  if (ints_sec.count() != 8 || reals_sec.count() != 2) {
    throw Error(ErrorCode::kBadFormat, "hyperparameter section sizes");
  }
  std::array<std::uint64_t, 8> ints{};
  std::memcpy(ints.data(), ints_sec.raw.data(), sizeof(ints));
  std::array<double, 2> reals{};
  std::memcpy(reals.data(), reals_sec.raw.data(), sizeof(reals));

  Hyperparams hp;
  hp.hidden = ints[0];
  hp.latent = ints[1];
  hp.embed = ints[2];
  hp.batch = ints[3];
  hp.epochs = ints[4];
  hp.seed = ints[5];
  hp.beta = reals[0];
  hp.lr = reals[1];
  if (ints[7] > 1) throw Error(ErrorCode::kBadFormat, "reconstruction mode");
  hp.reconstruction = static_cast<Reconstruction>(ints[7]);
  if (ints[6] != instruction_set().vocabulary().size()) {
    throw Error(ErrorCode::kBadFormat, "vocabulary size " + std::to_string(ints[6]) + " differs");
  }
  try {
    hp.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadFormat, e.what());
  }

  CVAEModel model = CVAEModel::zeros(hp);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& sec = expect(2 + i, names[i], kDtypeF64);
    auto& param = model.params()[i];
    const std::vector<std::uint64_t> want(param.value.shape().begin(), param.value.shape().end());
    if (sec.dims != want) {
      throw Error(ErrorCode::kBadFormat, "shape of " + names[i] + " does not match hyperparameters");
    }
    std::memcpy(param.value.data(), sec.raw.data(), sec.raw.size());
  }
  return model;
}

void save(const CVAEModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

CVAEModel load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace l2g
