#include "doctest.h"

#include "gms/error.hpp"
#include "gms/io.hpp"

#include "support/test_helpers.hpp"

#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

namespace io = gms::io;

TEST_CASE("u32 and f64 are written little-endian") {
    std::ostringstream out;
    io::write_u32(out, 0x01020304u);
    io::write_f64(out, 1.0);
    const std::string bytes = out.str();
    REQUIRE(bytes.size() == 12);

    CHECK(static_cast<unsigned char>(bytes[0]) == 0x04);
    CHECK(static_cast<unsigned char>(bytes[1]) == 0x03);
    CHECK(static_cast<unsigned char>(bytes[2]) == 0x02);
    CHECK(static_cast<unsigned char>(bytes[3]) == 0x01);

    // IEEE-754 1.0 is 0x3FF0000000000000.
    const unsigned char one[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
    CHECK(std::memcmp(bytes.data() + 4, one, 8) == 0);
}

TEST_CASE("scalar and array round trips are bit exact") {
    std::stringstream buf;
    const std::vector<double> values = {0.0, -0.0, 1.0 / 3.0, -2.5e-308, 1.7e308, 42.0};
    io::write_u32(buf, 0xDEADBEEFu);
    io::write_f64_array(buf, values.data(), values.size());

    CHECK(io::read_u32(buf) == 0xDEADBEEFu);
    std::vector<double> back(values.size());
    io::read_f64_array(buf, back.data(), back.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(std::memcmp(&back[i], &values[i], 8) == 0);
    }
}

TEST_CASE("append helpers produce the same bytes as the stream writers") {
    std::ostringstream out;
    io::write_u32(out, 777u);
    io::write_f64(out, 3.25);
    const double arr[2] = {-1.5, 9.0};
    io::write_f64_array(out, arr, 2);

    std::vector<std::uint8_t> buf;
    io::append_u32(buf, 777u);
    io::append_f64(buf, 3.25);
    io::append_f64_array(buf, arr, 2);

    const std::string streamed = out.str();
    REQUIRE(buf.size() == streamed.size());
    CHECK(std::memcmp(buf.data(), streamed.data(), buf.size()) == 0);
}

TEST_CASE("sha256 matches the published test vectors") {
    CHECK(io::sha256_hex(nullptr, 0) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string abc = "abc";
    CHECK(io::sha256_hex(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sha256_file hashes the file contents") {
    helpers::TempDir dir("io");
    const auto path = dir / "blob.bin";
    io::write_text_file(path, "abc");
    CHECK(io::sha256_file(path) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("format_full round-trips doubles exactly") {
    const std::vector<double> values = {0.1,         1.0 / 3.0, 3.141592653589793,
                                        -2.5e-308,   1.7e308,   123456.789,
                                        -0.00001234, 1e-9};
    for (double v : values) {
        const double back = std::stod(io::format_full(v));
        CHECK(std::memcmp(&back, &v, 8) == 0);
    }
    CHECK(std::stod(io::format_full(0.0)) == 0.0);
}

TEST_CASE("json files use sorted keys and a trailing newline") {
    helpers::TempDir dir("json");
    const auto path = dir / "cfg.json";
    nlohmann::json j;
    j["zeta"] = 1;
    j["alpha"] = {1, 2, 3};
    j["mid"] = "x";
    io::write_json_file(path, j);

    const std::string text = io::read_text_file(path);
    CHECK(text.back() == '\n');
    CHECK(text.find("alpha") < text.find("mid"));
    CHECK(text.find("mid") < text.find("zeta"));

    CHECK(io::read_json_file(path) == j);
}

TEST_CASE("reading a missing file reports an io error") {
    CHECK_THROWS_AS(io::read_json_file("/nonexistent/gms/file.json"), gms::IoError);
    CHECK_THROWS_AS(io::read_text_file("/nonexistent/gms/file.txt"), gms::IoError);
}
