#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mjsr;

namespace {

MatrixSet<double> two_scalars() { return MatrixSet<double>({RealMatrix{{1.0}}, RealMatrix{{2.0}}}); }

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no ValidationError thrown";
    return ErrorKind::EmptyConstraint;
}

} // namespace

TEST(ValidateInstance, AcceptsWellFormedPair) {
    auto inst = validate_instance(two_scalars(), TransitionMatrix{{1, 0}, {1, 1}});
    EXPECT_EQ(inst.set.size(), 2u);
    EXPECT_EQ(inst.omega.size(), 2u);
}

TEST(ValidateInstance, SizeMismatch) {
    EXPECT_EQ(kind_of([] { validate_instance(two_scalars(), TransitionMatrix::all_ones(3)); }),
              ErrorKind::DimensionMismatch);
}

TEST(ValidateInstance, NonBinaryEntryReportsLocation) {
    try {
        TransitionMatrix om(2, {1, 0, 2, 1});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonBinary);
        EXPECT_EQ(e.location(), "omega[2,1]");
    }
}

TEST(ValidateInstance, NonSquareMember) {
    EXPECT_EQ(kind_of([] { MatrixSet<double>({RealMatrix(2, 3)}); }), ErrorKind::NonSquare);
}

TEST(ValidateInstance, MixedDimensions) {
    EXPECT_EQ(kind_of([] { MatrixSet<double>({RealMatrix(2, 2), RealMatrix(3, 3)}); }),
              ErrorKind::DimensionMismatch);
}

TEST(ValidateInstance, NonFiniteEntryReportsLocation) {
    RealMatrix m(2, 2, 1.0);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    try {
        MatrixSet<double>({RealMatrix(2, 2), m});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
        EXPECT_EQ(e.location(), "matrices[2][2,1]");
    }
    ComplexMatrix c(1, 1, Complex(0.0, std::numeric_limits<double>::infinity()));
    EXPECT_EQ(kind_of([&] { MatrixSet<Complex>({c}); }), ErrorKind::NonFinite);
}

TEST(ValidateInstance, EmptySetRejected) {
    EXPECT_EQ(kind_of([] { MatrixSet<double>(std::vector<RealMatrix>{}); }), ErrorKind::DimensionMismatch);
}

TEST(MatrixSet, FieldTag) {
    EXPECT_EQ(two_scalars().field(), FieldTag::Real);
    MatrixSet<Complex> c({ComplexMatrix{{Complex(1, 0)}}});
    EXPECT_EQ(c.field(), FieldTag::Complex);
    EXPECT_TRUE(c.is_real_valued());
    EXPECT_FALSE(MatrixSet<Complex>({ComplexMatrix{{Complex(1, 1)}}}).is_real_valued());
}

TEST(WordClass, ContainmentOrder) {
    EXPECT_TRUE(implies(WordClass::PeriodicallyExtendable, WordClass::InfinitelyExtendable));
    EXPECT_TRUE(implies(WordClass::InfinitelyExtendable, WordClass::Markov));
    EXPECT_TRUE(implies(WordClass::Markov, WordClass::Chain));
    EXPECT_TRUE(implies(WordClass::PeriodicallyExtendable, WordClass::Chain));
    EXPECT_FALSE(implies(WordClass::Chain, WordClass::Markov));
    EXPECT_FALSE(implies(WordClass::Markov, WordClass::PeriodicallyExtendable));
    for (auto c : all_word_classes) EXPECT_TRUE(implies(c, c));
}

TEST(Word, OneBasedPrinting) {
    EXPECT_EQ(Word::from_one_based({1, 3, 4}).to_string(), "(1,3,4)");
    EXPECT_EQ(Word::from_one_based({1, 3, 4}).letters, (std::vector<std::size_t>{0, 2, 3}));
}

TEST(LongWords, Examples) {
    EXPECT_TRUE(has_arbitrarily_long_words(TransitionMatrix{{1}}));
    EXPECT_FALSE(has_arbitrarily_long_words(TransitionMatrix{{0, 0}, {1, 0}}));
    EXPECT_TRUE(has_arbitrarily_long_words(oracle::example_omega()));
    EXPECT_FALSE(has_arbitrarily_long_words(TransitionMatrix::zeros(3)));
}

TEST(LongWords, AcyclicHasNoLengthThreeChainWord) {
    const TransitionMatrix om{{0, 0}, {1, 0}};
    EXPECT_TRUE(oracle::words_in(om, 3, WordClass::Chain).empty());
    EXPECT_EQ(oracle::words_in(om, 2, WordClass::Chain).size(), 1u);
}

// A chain word of length N+1 exists iff the digraph has a cycle. For every
// class, arbitrarily long words exist iff some length in [N+1, 2N] has one,
// since that window holds a multiple of every cycle length up to N.
TEST(LongWords, MatchesBruteForceOnRandomOmegas) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto om = oracle::random_omega(rng, n, 0.35);
        const bool expected = !oracle::words_in(om, n + 1, WordClass::Chain).empty();
        for (auto c : all_word_classes) {
            EXPECT_EQ(has_arbitrarily_long_words(om, c), expected);
            bool found = false;
            for (std::size_t len = n + 1; len <= 2 * n && !found; ++len) found = !oracle::words_in(om, len, c).empty();
            EXPECT_EQ(found, expected) << "class " << to_string(c);
        }
    }
}

TEST(Matrix, InitializerListRejectsRaggedRows) {
    EXPECT_THROW((RealMatrix{{1.0, 2.0}, {3.0}}), ValidationError);
    EXPECT_THROW(RealMatrix(2, 2, std::vector<double>{1.0}), ValidationError);
}
