#include "nlks/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "nlks/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");
static_assert(sizeof(double) == 8);

namespace nlks {

namespace {

constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

struct Writer {
  std::vector<unsigned char> buf;
  void bytes(const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf.insert(buf.end(), b, b + len);
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u16(std::uint16_t v) { bytes(&v, 2); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void f64s(const std::vector<double>& v) { bytes(v.data(), v.size() * 8); }
};

struct Reader {
  const unsigned char* p;
  const unsigned char* end;
  const std::string& path;
  void bytes(void* out, std::size_t len) {
    if (static_cast<std::size_t>(end - p) < len) {
      throw io_error(path + ": truncated snapshot");
    }
    std::memcpy(out, p, len);
    p += len;
  }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
  std::uint16_t u16() { std::uint16_t v; bytes(&v, 2); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
  double f64() { double v; bytes(&v, 8); return v; }
  std::vector<double> f64s(std::size_t count) {
    if (static_cast<std::size_t>(end - p) < count * 8) {
      throw io_error(path + ": truncated snapshot");
    }
    std::vector<double> v(count);
    bytes(v.data(), count * 8);
    return v;
  }
};

void finish(Writer& w, const std::string& path) {
  const std::uint32_t crc = crc32(w.buf.data(), w.buf.size());
  w.u32(crc);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(w.buf.data()),
            static_cast<std::streamsize>(w.buf.size()));
  if (!out) throw io_error("failed writing " + path);
}

}  // namespace

void checkpoint_save(const RadialState& st, const std::string& path) {
  Writer w;
  w.bytes("NLKS", 4);
  w.u32(kVersion);
  w.u8(0);
  w.u8(st.mode == RadialMode::Physical ? 1 : 0);
  w.u16(0);
  w.f64(st.p.M0);
  w.f64(st.p.m0);
  w.f64(st.t);
  w.u64(st.grid.n());
  w.f64(st.grid.s_max);
  w.f64(st.grid.stretch);
  w.f64(st.rescale);
  w.f64(st.mass_deficit);
  w.f64s(st.grid.s);
  w.f64s(st.M);
  finish(w, path);
}

void checkpoint_save(const PlanarState& st, double L, const std::string& path) {
  std::uint64_t n = 0;
  while (n * n < st.u.size()) ++n;
  if (n * n != st.u.size()) {
    throw validation_error("planar field is not square");
  }
  Writer w;
  w.bytes("NLKS", 4);
  w.u32(kVersion);
  w.u8(1);
  w.u8(0);
  w.u16(0);
  w.f64(st.p.M0);
  w.f64(st.p.m0);
  w.f64(st.t);
  w.u64(n);
  w.f64(L);
  w.f64s(st.u);
  finish(w, path);
}

LoadedState checkpoint_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open snapshot " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 16) throw io_error(path + ": not a snapshot (too short)");
  const std::uint32_t stored =
      static_cast<std::uint32_t>(buf[buf.size() - 4]) |
      static_cast<std::uint32_t>(buf[buf.size() - 3]) << 8 |
      static_cast<std::uint32_t>(buf[buf.size() - 2]) << 16 |
      static_cast<std::uint32_t>(buf[buf.size() - 1]) << 24;
  if (crc32(buf.data(), buf.size() - 4) != stored) {
    throw io_error(path + ": checksum mismatch (corrupt snapshot)");
  }
  Reader r{buf.data(), buf.data() + buf.size() - 4, path};
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, "NLKS", 4) != 0) {
    throw io_error(path + ": bad magic (not a snapshot)");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw io_error(path + ": snapshot version " + std::to_string(version) +
                   " unsupported (this build reads version " +
                   std::to_string(kVersion) + ")");
  }
  const std::uint8_t solver = r.u8();
  const std::uint8_t mode = r.u8();
  r.u16();
  const double M0 = r.f64();
  const double m0 = r.f64();
  const double t = r.f64();
  if (solver == 0) {
    RadialState st;
    st.p = GrowthParams(M0, m0);
    st.t = t;
    st.mode = mode == 1 ? RadialMode::Physical : RadialMode::Normalized;
    const std::uint64_t n = r.u64();
    st.grid.s_max = r.f64();
    st.grid.stretch = r.f64();
    st.rescale = r.f64();
    st.mass_deficit = r.f64();
    st.grid.s = r.f64s(n);
    st.M = r.f64s(n);
    return st;
  }
  if (solver == 1) {
    PlanarCheckpoint cp;
    cp.state.p = GrowthParams(M0, m0);
    cp.state.t = t;
    cp.n = r.u64();
    cp.L = r.f64();
    cp.state.u = r.f64s(cp.n * cp.n);
    return cp;
  }
  throw io_error(path + ": unknown solver kind in snapshot");
}

}  // namespace nlks
