#include "lccad/data.hpp"
#include "lccad/serialize.hpp"

#include <gtest/gtest.h>

#include <cstring>

using namespace lccad;

namespace {

LccadModel fitted_model() {
    ToySpec spec;
    spec.n_per_class = 30;
    const auto ds = gen_toy(spec);
    HyperParams hp;
    hp.rff_dim = 16;
    return fit(ds.x, ds.graph, hp).model;
}

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST(Serialize, RoundTripIsBitExact) {
    const auto model = fitted_model();
    const auto bytes = serialize_model(model);
    const auto back = deserialize_model(bytes);
    EXPECT_EQ(serialize_model(back), bytes);
    EXPECT_TRUE(bit_equal(back.cluster.centers, model.cluster.centers));
    EXPECT_TRUE(bit_equal(back.weights.trans, model.weights.trans));
    EXPECT_TRUE(bit_equal(back.weights.emis, model.weights.emis));
    EXPECT_EQ(back.assignment, model.assignment);
    EXPECT_EQ(back.cluster.counts, model.cluster.counts);
    EXPECT_EQ(*back.hp.gamma, *model.hp.gamma);
    EXPECT_EQ(*back.hp.sigma, *model.hp.sigma);
    EXPECT_TRUE(bit_equal(back.mapper->freqs(), model.mapper->freqs()));
    EXPECT_TRUE(bit_equal(back.mapper->phases(), model.mapper->phases()));
}

TEST(Serialize, FileRoundTrip) {
    const auto model = fitted_model();
    const auto path = std::filesystem::path(::testing::TempDir()) / "model.bin";
    save_model(model, path);
    EXPECT_EQ(serialize_model(load_model(path)), serialize_model(model));
    EXPECT_THROW(load_model(path.string() + ".missing"), std::runtime_error);
}

TEST(Serialize, HeaderLayout) {
    const auto bytes = serialize_model(fitted_model());
    ASSERT_GE(bytes.size(), 28u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "LCCADMDL");
    EXPECT_EQ(bytes[8], kModelFormatVersion);
    EXPECT_EQ(bytes[12] | bytes[13] << 8, 60);  // n, little-endian
}

TEST(Serialize, RejectsCorruptInput) {
    const auto bytes = serialize_model(fitted_model());
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(deserialize_model(bad_magic), ModelFormatError);
    auto bad_version = bytes;
    bad_version[8] = 99;
    EXPECT_THROW(deserialize_model(bad_version), ModelFormatError);
    EXPECT_THROW(deserialize_model({bytes.begin(), bytes.end() - 1}), ModelFormatError);
    auto trailing = bytes;
    trailing.push_back(0);
    EXPECT_THROW(deserialize_model(trailing), ModelFormatError);
    auto bad_state = bytes;
    bad_state[bad_state.size() - 4] = 7;  // last assignment entry out of range
    EXPECT_THROW(deserialize_model(bad_state), ModelFormatError);
    EXPECT_THROW(serialize_model(LccadModel{}), std::logic_error);
}
