// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "runsafe/errors.hpp"
#include "runsafe/flight_sim.hpp"
#include "runsafe/telemetry.hpp"

using namespace runsafe;

namespace {

void put_record(std::vector<std::uint8_t>& out, std::int32_t index, std::array<float, 8> values) {
    std::uint8_t buf[4];
    std::memcpy(buf, &index, 4);  // little-endian host
    out.insert(out.end(), buf, buf + 4);
    for (float v : values) {
        std::memcpy(buf, &v, 4);
        out.insert(out.end(), buf, buf + 4);
    }
}

std::vector<std::uint8_t> prologue() { return {'D', 'A', 'T', 'A', 0}; }

constexpr float kU = -999.0f;

// Hand-assembled datagram: 130 kt ground speed, 300 ft AGL, on ground 0.
std::vector<std::uint8_t> sample_datagram(float t = 12.5f) {
    auto d = prologue();
    put_record(d, 1, {kU, kU, t, kU, kU, kU, kU, kU});
    put_record(d, 3, {kU, kU, kU, 130.0f, kU, kU, kU, kU});
    put_record(d, 4, {kU, kU, -600.0f, kU, kU, 0.1f, kU, kU});
    put_record(d, 14, {kU, 0.0f, kU, kU, kU, kU, kU, kU});
    put_record(d, 20, {kU, kU, kU, 300.0f, 0.0f, kU, kU, kU});
    put_record(d, 21, {kU, kU, kU, kU, kU, kU, -1000.0f, kU});
    put_record(d, 26, {0.25f, kU, kU, kU, kU, kU, kU, kU});
    return d;
}

}  // namespace

TEST(Datagram, ParsesHandAssembledFixture) {
    const auto d = sample_datagram();
    ASSERT_EQ(d.size(), kPrologueSize + 7 * kRecordSize);
    const auto r = parse_datagram(d);
    ASSERT_EQ(r.status, ParseStatus::Ok);
    ASSERT_EQ(r.records.size(), 7u);
    EXPECT_EQ(r.records[1].index, 3);
    EXPECT_FLOAT_EQ(r.records[1].values[3], 130.0f);

    const TelemetryFrame f = assemble_frame(r.records, ChannelMapping::defaults(), 0.0);
    EXPECT_NEAR(f.ground_speed, 66.88, 0.005);
    EXPECT_NEAR(f.height_agl, 91.44, 1e-3);
    EXPECT_NEAR(f.vertical_speed, -3.048, 1e-4);
    EXPECT_NEAR(f.distance_along_runway, -304.8, 1e-3);
    EXPECT_NEAR(f.acceleration, 0.980665, 1e-5);
    EXPECT_NEAR(f.throttle_fraction, 0.25, 1e-7);
    EXPECT_FALSE(f.on_ground);
    EXPECT_FALSE(f.brakes_applied);
    EXPECT_DOUBLE_EQ(f.timestamp, 12.5);
}

TEST(Datagram, MalformedInputIsReportedNotThrown) {
    auto bad_magic = sample_datagram();
    bad_magic[0] = 'X';
    EXPECT_EQ(parse_datagram(bad_magic).status, ParseStatus::BadMagic);
    EXPECT_TRUE(parse_datagram(bad_magic).records.empty());

    auto short_tail = sample_datagram();
    short_tail.pop_back();
    EXPECT_EQ(parse_datagram(short_tail).status, ParseStatus::BadLength);
    EXPECT_TRUE(parse_datagram(short_tail).records.empty());

    EXPECT_EQ(parse_datagram(std::vector<std::uint8_t>{'D', 'A'}).status, ParseStatus::BadMagic);
    EXPECT_EQ(parse_datagram(prologue()).status, ParseStatus::Ok);
}

TEST(Datagram, EncodeParseRoundTrip) {
    TelemetryFrame f;
    f.timestamp = 3.25;
    f.ground_speed = 40.0;
    f.vertical_speed = -1.0;
    f.height_agl = 5.0;
    f.distance_along_runway = 321.0;
    f.acceleration = 1.5;
    f.throttle_fraction = 0.9;
    f.on_ground = true;
    f.brakes_applied = true;
    const auto mapping = ChannelMapping::defaults();
    const auto bytes = encode_datagram(records_from_frame(f, mapping));
    const auto parsed = parse_datagram(bytes);
    ASSERT_EQ(parsed.status, ParseStatus::Ok);
    const auto g = assemble_frame(parsed.records, mapping, 0.0);
    EXPECT_NEAR(g.timestamp, f.timestamp, 1e-6);
    EXPECT_NEAR(g.ground_speed, f.ground_speed, 1e-4);
    EXPECT_NEAR(g.vertical_speed, f.vertical_speed, 1e-4);
    EXPECT_NEAR(g.height_agl, f.height_agl, 1e-4);
    EXPECT_NEAR(g.distance_along_runway, f.distance_along_runway, 1e-3);
    EXPECT_NEAR(g.acceleration, f.acceleration, 1e-5);
    EXPECT_NEAR(g.throttle_fraction, f.throttle_fraction, 1e-6);
    EXPECT_TRUE(g.on_ground);
    EXPECT_TRUE(g.brakes_applied);
}

TEST(Assembler, CarriesForwardAndCountsStaleness) {
    FrameAssembler a(ChannelMapping::defaults());
    const auto full = parse_datagram(sample_datagram()).records;
    a.assemble(full, 0.0);

    auto partial = parse_datagram(sample_datagram(12.55f)).records;
    partial.erase(partial.begin() + 1);  // drop ground speed
    const auto f = a.assemble(partial, 0.0);
    EXPECT_NEAR(f.ground_speed, 66.88, 0.005);
    EXPECT_EQ(a.staleness()[0], 1u);
    EXPECT_EQ(a.staleness()[2], 0u);
    a.assemble(full, 0.0);
    EXPECT_EQ(a.staleness()[0], 0u);
}

TEST(Assembler, MissingWithoutPriorThrows) {
    auto partial = parse_datagram(sample_datagram()).records;
    partial.erase(partial.begin() + 1);
    try {
        assemble_frame(partial, ChannelMapping::defaults(), 0.0);
        FAIL() << "expected NoPriorValue";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoPriorValue);
    }
}

TEST(Listener, DropsDuplicateTimestamps) {
    UdpListener l(0, ChannelMapping::defaults());
    l.ingest(sample_datagram(1.0f), 0.0);
    l.ingest(sample_datagram(1.0f), 0.0);
    l.ingest(sample_datagram(0.5f), 0.0);
    l.ingest(sample_datagram(1.05f), 0.0);
    auto bad = sample_datagram();
    bad[1] = 'Z';
    l.ingest(bad, 0.0);
    EXPECT_EQ(l.counters().frames.load(), 2u);
    EXPECT_EQ(l.counters().non_monotonic.load(), 2u);
    EXPECT_EQ(l.counters().bad_magic.load(), 1u);
    EXPECT_EQ(l.frames().size(), 2u);
}

TEST(Listener, QueueDropsOldestWhenFull) {
    UdpListener l(0, ChannelMapping::defaults(), 4);
    for (int i = 0; i < 10; ++i) l.ingest(sample_datagram(static_cast<float>(i)), 0.0);
    EXPECT_EQ(l.frames().size(), 4u);
    EXPECT_EQ(l.counters().queue_drops.load(), 6u);
    const auto first = l.frames().pop(std::chrono::milliseconds(0));
    ASSERT_TRUE(first);
    EXPECT_DOUBLE_EQ(first->timestamp, 6.0);
}

TEST(Listener, LoopbackHundredDatagrams) {
    UdpListener l(0, ChannelMapping::defaults(), 256);
    l.start();
    const auto tx = net::connect_udp("127.0.0.1", l.port());
    for (int i = 0; i < 100; ++i) {
        ASSERT_TRUE(net::send_datagram(tx, sample_datagram(static_cast<float>(i) * 0.05f)));
    }
    std::vector<TelemetryFrame> got;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (got.size() < 100 && std::chrono::steady_clock::now() < deadline) {
        if (auto f = l.frames().pop(std::chrono::milliseconds(50))) got.push_back(*f);
    }
    l.stop();
    ASSERT_EQ(got.size(), 100u);
    for (std::size_t i = 1; i < got.size(); ++i) EXPECT_GT(got[i].timestamp, got[i - 1].timestamp);
    EXPECT_EQ(l.counters().datagrams.load(), 100u);
}

TEST(Listener, SecondBindOnSamePortFails) {
    UdpListener a(0, ChannelMapping::defaults());
    try {
        UdpListener b(a.port(), ChannelMapping::defaults());
        FAIL() << "expected BindFailure";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BindFailure);
    }
}

TEST(Mapping, JsonRoundTrip) {
    const auto m = ChannelMapping::defaults();
    nlohmann::json j = m;
    const auto back = j.get<ChannelMapping>();
    nlohmann::json j2 = back;
    EXPECT_EQ(j, j2);
    ASSERT_TRUE(back.time);
    EXPECT_EQ(back.time->index, 1);
}
