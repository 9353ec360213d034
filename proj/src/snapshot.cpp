#include "fwdiss/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fwdiss/error.hpp"

namespace fwdiss {

namespace {

constexpr char kMagic[4] = {'F', 'W', 'S', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 1 + 8;

static_assert(std::endian::native == std::endian::little,
              "FWS1 encoding assumes a little-endian host");

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <class T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap) {
  const Grid& grid = snap.field.grid();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * grid.size() + 1);
  out.insert(out.end(), kMagic, kMagic + 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.size()));
  put<double>(out, grid.half_length());
  put<std::uint8_t>(out, static_cast<std::uint8_t>(grid.frame()));
  put<double>(out, snap.t);
  for (double v : snap.field.values()) put<double>(out, v);
  if (snap.profile_tag) put<std::uint8_t>(out, *snap.profile_tag);
  return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ConfigError("FWS1: bad magic or truncated header");
  }
  std::size_t pos = 4;
  const auto n = get<std::uint32_t>(bytes, pos);
  const auto half_length = get<double>(bytes, pos);
  const auto frame_byte = get<std::uint8_t>(bytes, pos);
  const auto t = get<double>(bytes, pos);
  if (frame_byte > 1) throw ConfigError("FWS1: unknown frame byte");
  const std::size_t payload = kHeaderBytes + 8 * static_cast<std::size_t>(n);
  if (bytes.size() != payload && bytes.size() != payload + 1) {
    throw ConfigError("FWS1: size does not match N");
  }
  const Grid grid(half_length, n, static_cast<Frame>(frame_byte));
  std::vector<double> values(n);
  for (auto& v : values) v = get<double>(bytes, pos);
  std::optional<std::uint8_t> tag;
  if (bytes.size() == payload + 1) tag = get<std::uint8_t>(bytes, pos);
  return Snapshot{t, Field(grid, std::move(values)), tag};
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  const auto bytes = encode_snapshot(snap);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace fwdiss
