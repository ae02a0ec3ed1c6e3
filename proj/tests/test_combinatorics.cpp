#include <doctest.h>

#include "qlog/combinatorics.hpp"

using namespace qlog;

TEST_SUITE("combinatorics") {
  TEST_CASE("lexicographic compositions") {
    auto c = compositions(4, 3);
    REQUIRE(c.size() == 3);
    CHECK(c[0].parts == std::vector<int>{1, 1, 2});
    CHECK(c[1].parts == std::vector<int>{1, 2, 1});
    CHECK(c[2].parts == std::vector<int>{2, 1, 1});
    auto d = compositions(4, 2);
    REQUIRE(d.size() == 3);
    CHECK(d[0].parts == std::vector<int>{1, 3});
    CHECK(d[2].parts == std::vector<int>{3, 1});
    CHECK(compositions(3, 4).empty());
    CHECK(compositions(5, 1).size() == 1);
  }

  TEST_CASE("counts are binomial") {
    CHECK(composition_count(10, 4) == 84);
    CHECK(composition_count(24, 12) == 1352078);
    for (int n = 1; n <= 16; ++n) {
      std::uint64_t total = 0;
      for (int l = 1; l <= n; ++l) {
        std::uint64_t k = 0;
        CompositionStream s(n, l);
        while (s.next()) {
          int sum = 0;
          for (int p : s.parts()) sum += p;
          CHECK(sum == n);
          ++k;
        }
        CHECK(k == composition_count(n, l));
        total += k;
      }
      CHECK(total == (std::uint64_t{1} << (n - 1)));
    }
  }

  TEST_CASE("stream reports the changed suffix") {
    CompositionStream s(5, 3);
    REQUIRE(s.next());
    std::vector<int> prev = s.parts();
    while (s.next()) {
      for (int i = 0; i < s.changed_from(); ++i) CHECK(s.parts()[i] == prev[i]);
      prev = s.parts();
    }
  }

  TEST_CASE("weighted sums") {
    // sum over compositions of prod x_k with x_k = 1 counts them
    std::vector<double> ones(10, 1.0);
    CHECK(composition_product_sum<double>(9, 3, ones) == doctest::Approx(28.0));
    CHECK(composition_sum(6, 2, [](const Composition& c) { return double(c.parts[0]); }) ==
          doctest::Approx(15.0));
    CHECK_THROWS_AS(composition_sum(30, 2, [](const Composition&) { return 1.0; }), DomainError);
  }
}
