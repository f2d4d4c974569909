#include "doctest.h"
#include "dlcot/digest.hpp"

#include <string>

using dlcot::sha256_hex;

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 handles block-boundary lengths") {
  // 55, 56, 63, 64, 65 bytes exercise the padding paths.
  for (std::size_t len : {55u, 56u, 63u, 64u, 65u, 119u, 120u}) {
    const std::string a(len, 'x');
    const std::string b = a + "y";
    CHECK(sha256_hex(a) != sha256_hex(b));
    CHECK(sha256_hex(a).size() == 64);
    CHECK(sha256_hex(a) == sha256_hex(std::string(len, 'x')));
  }
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}
