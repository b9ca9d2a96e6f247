#include "vnrg/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

namespace vnrg {

namespace {

constexpr char kMagic[8] = {'V', 'N', 'R', 'G', 'M', 'P', 'S', '\0'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const T le = to_little(v);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&le);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

struct Overrun {};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > b_.size()) throw Overrun{};
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> b) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < b.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(b.size() - off, 1u << 30));
    crc = crc32(crc, b.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_tensor_data(Writer& w, const Tensor& t) {
  for (double v : t.data()) w.put(v);
}

Shape read_shape(Reader& r) {
  Shape s(3);
  for (auto& x : s) x = static_cast<std::size_t>(r.get<std::uint64_t>());
  return s;
}

/// Parses the body after magic and version. Throws Overrun on short input.
NrgMps parse_body(Reader& r) {
  NrgMps st;
  const auto flags = r.get<std::uint32_t>();
  const auto kind = r.get<std::uint32_t>();
  if (kind > 1) throw CheckpointError(CheckpointError::Kind::Corrupt, "unknown external leg kind");
  st.external.kind = static_cast<ExternalLeg::Kind>(kind);
  st.external.position = static_cast<std::size_t>(r.get<std::uint64_t>());
  const auto n = r.get<std::uint64_t>();
  if (n == 0 || n > (1u << 20)) throw CheckpointError(CheckpointError::Kind::Corrupt, "implausible chain length");
  std::vector<Shape> shapes;
  for (std::uint64_t j = 0; j < n; ++j) shapes.push_back(read_shape(r));
  Shape bond_shape;
  if (st.external.kind == ExternalLeg::Kind::Bond) bond_shape = read_shape(r);
  if (flags & 1U) {
    for (std::uint64_t b = 0; b <= n; ++b) {
      const auto count = r.get<std::uint64_t>();
      if (count > r.remaining() / 8) throw Overrun{};
      std::vector<Charge> cs(static_cast<std::size_t>(count));
      for (auto& c : cs) {
        c[0] = r.get<std::int32_t>();
        c[1] = r.get<std::int32_t>();
      }
      st.bond_charges.push_back(std::move(cs));
    }
  }
  auto read_tensor = [&](const Shape& s) {
    for (auto x : s)
      if (x == 0) throw CheckpointError(CheckpointError::Kind::Corrupt, "zero extent in shape table");
    const std::size_t size = shape_size(s);
    if (size > r.remaining() / 8) throw Overrun{};
    std::vector<double> data(size);
    for (auto& v : data) v = r.get<double>();
    return Tensor(s, std::move(data));
  };
  for (const auto& s : shapes) st.sites.push_back(read_tensor(s));
  if (!bond_shape.empty()) st.bond_tensor = read_tensor(bond_shape);
  return st;
}

}  // namespace

std::vector<std::uint8_t> serialize_state(const NrgMps& state) {
  state.validate();
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(state.has_charges() ? 1U : 0U);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(state.external.kind));
  w.put<std::uint64_t>(state.external.position);
  w.put<std::uint64_t>(state.length());
  for (const auto& s : state.sites)
    for (auto x : s.shape()) w.put<std::uint64_t>(x);
  const bool bond = state.external.kind == ExternalLeg::Kind::Bond;
  if (bond)
    for (auto x : state.bond_tensor.shape()) w.put<std::uint64_t>(x);
  for (const auto& cs : state.bond_charges) {
    w.put<std::uint64_t>(cs.size());
    for (const auto& c : cs) {
      w.put<std::int32_t>(c[0]);
      w.put<std::int32_t>(c[1]);
    }
  }
  for (const auto& s : state.sites) put_tensor_data(w, s);
  if (bond) put_tensor_data(w, state.bond_tensor);
  const std::uint32_t crc = crc_of(w.bytes());
  w.put<std::uint32_t>(crc);
  return std::move(w.bytes());
}

NrgMps deserialize_state(std::span<const std::uint8_t> bytes) {
  using K = CheckpointError::Kind;
  if (bytes.size() < sizeof kMagic) throw CheckpointError(K::Truncated, "checkpoint is shorter than its header");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw CheckpointError(K::BadMagic, "not a vnrg checkpoint (bad magic)");
  Reader head(bytes.subspan(sizeof kMagic));
  std::uint32_t version = 0;
  try {
    version = head.get<std::uint32_t>();
  } catch (const Overrun&) {
    throw CheckpointError(K::Truncated, "checkpoint ends inside its header");
  }
  if (version != kCheckpointVersion)
    throw CheckpointError(K::VersionMismatch, "checkpoint version " + std::to_string(version) + " is not supported (expected " +
                                                  std::to_string(kCheckpointVersion) + ")");
  const std::size_t body_begin = sizeof kMagic + 4;
  const bool crc_ok = bytes.size() >= body_begin + 4 && [&] {
    Reader tail(bytes.subspan(bytes.size() - 4));
    return tail.get<std::uint32_t>() == crc_of(bytes.first(bytes.size() - 4));
  }();
  if (!crc_ok) {
    // Distinguish a cut-off file from damaged content.
    Reader r(bytes.subspan(body_begin));
    try {
      parse_body(r);
    } catch (const Overrun&) {
      throw CheckpointError(K::Truncated, "checkpoint is truncated");
    } catch (const CheckpointError&) {
    }
    if (r.remaining() < 4) throw CheckpointError(K::Truncated, "checkpoint is missing its checksum");
    throw CheckpointError(K::Corrupt, "checkpoint checksum mismatch");
  }
  Reader r(bytes.subspan(body_begin, bytes.size() - body_begin - 4));
  NrgMps st;
  try {
    st = parse_body(r);
  } catch (const Overrun&) {
    throw CheckpointError(K::Corrupt, "checkpoint shape table does not match its payload");
  }
  if (r.remaining() != 0) throw CheckpointError(K::Corrupt, "trailing bytes after checkpoint payload");
  try {
    st.validate();
  } catch (const InvalidArgument& e) {
    throw CheckpointError(K::Corrupt, std::string("checkpoint holds an invalid state: ") + e.what());
  }
  return st;
}

void save_state(const NrgMps& state, const std::string& path) {
  const auto bytes = serialize_state(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

NrgMps load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_state(bytes);
}

std::string describe_checkpoint(const std::string& path) {
  const NrgMps st = load_state(path);
  std::ostringstream os;
  os << "format version: " << kCheckpointVersion << "\n";
  os << "sites: " << st.length() << "\n";
  os << "states (M): " << st.num_states() << "\n";
  os << "external leg: " << (st.external.kind == ExternalLeg::Kind::Site ? "site " : "bond ") << st.external.position << "\n";
  os << "physical dims:";
  for (auto d : st.physical_dims()) os << " " << d;
  os << "\nbond dims:";
  for (const auto& s : st.sites) os << " " << s.extent(0);
  os << " " << st.sites.back().extent(2) << "\n";
  os << "charge labels: " << (st.has_charges() ? "yes" : "no") << "\n";
  os << "max isometry residual: " << max_isometry_residual(st) << "\n";
  return os.str();
}

}  // namespace vnrg
