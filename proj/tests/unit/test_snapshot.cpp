#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "fwdiss/error.hpp"
#include "fwdiss/snapshot.hpp"
#include "oracles.hpp"

using namespace fwdiss;

TEST_CASE("FWS1 layout") {
  const Grid g(3.5, 8, Frame::lab);
  const Snapshot snap{1.25, Field(g, oracle::random_values(8, 3)), std::nullopt};
  const auto bytes = encode_snapshot(snap);
  REQUIRE(bytes.size() == 4 + 4 + 8 + 1 + 8 + 8 * 8);
  CHECK(std::memcmp(bytes.data(), "FWS1", 4) == 0);
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 4, 4);
  CHECK(n == 8);
  double L = 0.0;
  std::memcpy(&L, bytes.data() + 8, 8);
  CHECK(L == 3.5);
  CHECK(bytes[16] == 0);
  double t = 0.0;
  std::memcpy(&t, bytes.data() + 17, 8);
  CHECK(t == 1.25);
  double v0 = 0.0;
  std::memcpy(&v0, bytes.data() + 25, 8);
  CHECK(v0 == snap.field[0]);
}

TEST_CASE("FWS1 round trip with and without a profile tag") {
  const Grid g(12.0, 64, Frame::comoving);
  for (auto tag : {std::optional<std::uint8_t>{}, std::optional<std::uint8_t>{3}}) {
    const Snapshot snap{7.5, Field(g, oracle::random_values(64, 9)), tag};
    const auto path = std::filesystem::temp_directory_path() / "fwdiss_snapshot_test.fws";
    write_snapshot(path, snap);
    const Snapshot back = read_snapshot(path);
    std::filesystem::remove(path);
    CHECK(back.t == snap.t);
    CHECK(back.field.grid() == g);
    CHECK(back.profile_tag == tag);
    for (std::size_t j = 0; j < 64; ++j) CHECK(back.field[j] == snap.field[j]);
  }
}

TEST_CASE("FWS1 rejects malformed input") {
  const Grid g(1.0, 8);
  auto bytes = encode_snapshot({0.0, Field::zeros(g), std::nullopt});
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS((void)decode_snapshot(bad_magic), ConfigError);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS((void)decode_snapshot(truncated), ConfigError);
  auto bad_frame = bytes;
  bad_frame[16] = 7;
  CHECK_THROWS_AS((void)decode_snapshot(bad_frame), ConfigError);
  CHECK_THROWS_AS((void)read_snapshot("/nonexistent/dir/x.fws"), ConfigError);
}
