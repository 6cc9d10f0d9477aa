#include "escrowscan/ensemble.hpp"

#include <doctest.h>

using namespace escrowscan;

TEST_CASE("majority vote") {
    CHECK(majority_vote({Label::Fake, Label::Fake, Label::Real}) == Label::Fake);
    CHECK(majority_vote({Label::Real, Label::Real, Label::Fake}) == Label::Real);
    CHECK(majority_vote({Label::Real, Label::Real, Label::Real}) == Label::Real);
    // exact tie resolves to Fake (flagging is the conservative error)
    CHECK(majority_vote({Label::Fake, Label::Real}) == Label::Fake);
    CHECK(majority_vote({Label::Fake}) == Label::Fake);
}

TEST_CASE("unknown votes count toward Fake") {
    CHECK(majority_vote({Label::Unknown, Label::Real, Label::Fake}) == Label::Fake);
    CHECK(majority_vote({Label::Unknown, Label::Unknown, Label::Real}) == Label::Fake);
}

TEST_CASE("score mean vote splits on zero") {
    CHECK(score_mean_vote({1.0, -0.2, 0.5}) == Label::Fake);   // mean > 0
    CHECK(score_mean_vote({-1.0, 0.2, -0.5}) == Label::Real);  // mean < 0
    CHECK(score_mean_vote({0.7, -0.7}) == Label::Fake);        // ties flag, like the vote
    CHECK(score_mean_vote({}) == Label::Fake);
}
