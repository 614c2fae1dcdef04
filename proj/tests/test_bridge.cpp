// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <thread>

#include "fbs/bridge.hpp"
#include "fbs/errors.hpp"
#include "harness.hpp"
#include "oracles.hpp"

using namespace fbs;
using namespace fbs::bridge;
using nlohmann::json;

namespace {

std::vector<double> linear_table(std::size_t n) {
    const auto s = Schedule::linear(n, 1, 1e-4, 0.02);
    return {s.alpha_bar_table().begin() + 1, s.alpha_bar_table().end()};
}

// Test server: handshake advertises a linear schedule; predict/encode/decode
// echo their input tensor unless `on_predict` overrides.
struct EchoServer {
    std::size_t n_train = 1000;
    std::vector<double> alpha_bar = linear_table(1000);
    std::atomic<int> predicts{0};
    std::function<Frame(const Frame&)> on_predict;

    Frame operator()(const Frame& req) {
        const auto op = req.header.at("op").get<std::string>();
        if (op == "handshake") {
            Frame r;
            r.header["n_train"] = n_train;
            r.header["alpha_bar"] = alpha_bar;
            return r;
        }
        if (op == "predict_eps") {
            ++predicts;
            if (on_predict) return on_predict(req);
        }
        if (op == "predict_eps" || op == "encode" || op == "decode") {
            return tensor_frame(op, frame_tensor(req), req.header.at("dtype") == "f32" ? Dtype::f32 : Dtype::f64);
        }
        return Frame{};
    }
};

// Client connected to `server` running in a background thread.
struct Loopback {
    std::unique_ptr<BridgeClient> client;
    std::thread thread;

    explicit Loopback(std::function<Frame(const Frame&)> handler) {
        auto [a, b] = make_stream_pair();
        thread = std::thread([s = std::move(b), handler = std::move(handler)]() mutable { serve(*s, handler); });
        client = std::make_unique<BridgeClient>(std::move(a));
    }
    ~Loopback() {
        client.reset();  // closes our end; the serve loop sees EOF
        thread.join();
    }
};

template <typename F>
auto ref(F& f) {
    return [&f](const Frame& r) { return f(r); };
}

}  // namespace

TEST_CASE("frame layout: u32 LE header length, JSON header, payload") {
    Frame f;
    f.header["op"] = "x";
    f.payload = {std::byte{1}, std::byte{2}, std::byte{3}};
    const auto bytes = encode_frame(f);
    const std::uint32_t len = std::to_integer<std::uint32_t>(bytes[0]) | std::to_integer<std::uint32_t>(bytes[1]) << 8 |
                              std::to_integer<std::uint32_t>(bytes[2]) << 16 |
                              std::to_integer<std::uint32_t>(bytes[3]) << 24;
    REQUIRE(bytes.size() == 4 + len + 3);
    const auto header = json::parse(std::string(reinterpret_cast<const char*>(bytes.data()) + 4, len));
    CHECK(header.at("op") == "x");
    CHECK(header.at("payload_bytes") == 3);
    CHECK(bytes.back() == std::byte{3});
}

TEST_CASE("tensor frames roundtrip in f64 and widen from f32") {
    const auto t = oracle::random_feature({2, 3, 4}, 1);
    CHECK(frame_tensor(tensor_frame("x", t)) == t);
    auto f32 = tensor_frame("x", t, Dtype::f32);
    f32.header["payload_bytes"] = f32.payload.size();
    const auto w = frame_tensor(f32);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(w[k] == static_cast<double>(static_cast<float>(t[k])));

    auto bad = tensor_frame("x", t);
    bad.payload.pop_back();
    CHECK_THROWS_AS(frame_tensor(bad), ProtocolError);
    auto nan = tensor_frame("x", LatentFeature({1, 2, 2}, {0, std::numeric_limits<double>::quiet_NaN(), 0, 0}));
    CHECK_THROWS_AS(frame_tensor(nan), ProtocolError);
    auto dtype = tensor_frame("x", t);
    dtype.header["dtype"] = "bf16";
    CHECK_THROWS_AS(frame_tensor(dtype), ProtocolError);
}

TEST_CASE("echo loopback: predictions come back bit-exact") {
    EchoServer server;
    Loopback lb(ref(server));
    const Shape s{4, 8, 8};
    const auto info = lb.client->handshake(s, 1000);
    CHECK(info.n_train == 1000);
    CHECK(info.alpha_bar == server.alpha_bar);
    BridgeDenoiser d(*lb.client);
    for (int k = 0; k < 100; ++k) {
        const auto z = oracle::random_feature(s, 500 + k);
        CHECK(d.predict(z, 1 + k, k % 2 ? CondId::target_text : CondId::null_text) == z);
    }
    CHECK(d.call_counts().total() == 100);
    CHECK(d.call_counts().null_text == 50);
    CHECK(server.predicts == 100);
    CHECK(lb.client->requests() == 101);
    const auto z = oracle::random_feature(s, 1);
    CHECK(lb.client->encode(z) == z);
    CHECK(lb.client->decode(z) == z);
    lb.client->shutdown();
}

TEST_CASE("request headers carry timestep and conditioning") {
    EchoServer server;
    json seen;
    server.on_predict = [&](const Frame& req) {
        seen = req.header;
        return tensor_frame("predict_eps", frame_tensor(req));
    };
    Loopback lb(ref(server));
    lb.client->handshake({1, 2, 2}, 1000);
    lb.client->predict_eps(LatentFeature::zeros({1, 2, 2}), 380, CondId::target_text);
    CHECK(seen.at("timestep") == 380);
    CHECK(seen.at("cond") == "target_text");
    CHECK(seen.at("shape") == json::array({1, 2, 2}));
    CHECK(seen.at("dtype") == "f64");
    CHECK(seen.at("payload_bytes") == 32);
}

TEST_CASE("handshake rejects a mismatched or malformed schedule") {
    SUBCASE("n_train mismatch, before any predict") {
        EchoServer server;
        server.n_train = 500;
        server.alpha_bar = linear_table(500);
        Loopback lb(ref(server));
        CHECK_THROWS_AS(lb.client->handshake({1, 4, 4}, 1000), ProtocolError);
        CHECK_FALSE(lb.client->handshaken());
        CHECK_THROWS_AS(lb.client->predict_eps(LatentFeature::zeros({1, 4, 4}), 1, CondId::null_text), ProtocolError);
        CHECK(server.predicts == 0);
    }
    SUBCASE("alpha_bar not strictly decreasing") {
        EchoServer server;
        server.alpha_bar[10] = server.alpha_bar[9];
        Loopback lb(ref(server));
        CHECK_THROWS_AS(lb.client->handshake({1, 4, 4}, 1000), ProtocolError);
    }
}

TEST_CASE("shape agreement is enforced both ways") {
    EchoServer server;
    server.on_predict = [](const Frame&) { return tensor_frame("predict_eps", LatentFeature::zeros({1, 3, 3})); };
    Loopback lb(ref(server));
    lb.client->handshake({1, 2, 2}, 1000);
    CHECK_THROWS_AS(lb.client->predict_eps(LatentFeature::zeros({1, 3, 3}), 1, CondId::null_text), ProtocolError);
    CHECK_THROWS_AS(lb.client->predict_eps(LatentFeature::zeros({1, 2, 2}), 1, CondId::null_text), ProtocolError);
}

TEST_CASE("remote exceptions pass their message through") {
    EchoServer server;
    server.on_predict = [](const Frame&) -> Frame { throw std::runtime_error("CUDA out of memory"); };
    Loopback lb(ref(server));
    lb.client->handshake({1, 2, 2}, 1000);
    try {
        lb.client->predict_eps(LatentFeature::zeros({1, 2, 2}), 1, CondId::null_text);
        FAIL("expected a remote error");
    } catch (const RemoteError& e) {
        CHECK(std::string(e.what()).find("CUDA out of memory") != std::string::npos);
    }
    // The session survives a remote error.
    server.on_predict = nullptr;
    CHECK(lb.client->predict_eps(LatentFeature::filled({1, 2, 2}, 2.0), 1, CondId::null_text) ==
          LatentFeature::filled({1, 2, 2}, 2.0));
}

TEST_CASE("a vanished server is a transport error") {
    auto [a, b] = make_stream_pair();
    BridgeClient client(std::move(a));
    b.reset();
    CHECK_THROWS_AS(client.handshake({1, 2, 2}, 1000), TransportError);
}

TEST_CASE("serve answers a garbage header with a protocol error and keeps going") {
    auto [a, b] = make_stream_pair();
    EchoServer server;
    std::thread t([&, s = std::move(b)]() mutable { serve(*s, ref(server)); });
    const std::string junk = "{not json";
    std::vector<std::byte> raw = {std::byte(junk.size()), std::byte{0}, std::byte{0}, std::byte{0}};
    for (char c : junk) raw.push_back(static_cast<std::byte>(c));
    a->write_all(raw);
    const auto resp = read_frame(*a);
    CHECK(resp.header.at("status") == "error");
    CHECK(resp.header.at("error_kind") == "protocol");
    Frame bye;
    bye.header["op"] = "shutdown";
    write_frame(*a, bye);
    CHECK(read_frame(*a).header.at("status") == "ok");
    t.join();
}

TEST_CASE("connect rejects unknown address schemes") {
    CHECK_THROWS(connect("http://example"));
    CHECK_THROWS_AS(connect("unix:/nonexistent/fbs.sock"), TransportError);
}

TEST_CASE("recorded transcript replays against a fresh server") {
    oracle::TempDir dir("bridge");
    const auto path = dir / "session.bin";
    const Shape s{1, 4, 4};
    const auto schedule = Schedule::linear(1000, 10, 1e-4, 0.02);
    auto model = harness::toy_denoiser(s, schedule);
    const auto handler = [&](const Frame& req) -> Frame {
        const auto op = req.header.at("op").get<std::string>();
        if (op == "handshake") {
            Frame r;
            r.header["n_train"] = 1000;
            r.header["alpha_bar"] = std::vector<double>(schedule.alpha_bar_table().begin() + 1,
                                                        schedule.alpha_bar_table().end());
            return r;
        }
        if (op == "predict_eps") {
            return tensor_frame(op, model->predict(frame_tensor(req), req.header.at("timestep").get<Timestep>(),
                                                   parse_cond_id(req.header.at("cond").get<std::string>())));
        }
        return Frame{};
    };
    {
        Loopback lb(handler);
        lb.client->record_transcript(path);
        lb.client->handshake(s, 1000);
        for (Timestep t : {1u, 500u, 1000u})
            lb.client->predict_eps(oracle::random_feature(s, t), t, t % 2 ? CondId::null_text : CondId::target_text);
        lb.client->shutdown();
    }

    std::ifstream is(path, std::ios::binary);
    std::vector<char> bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    std::vector<std::pair<char, std::vector<std::byte>>> records;
    for (std::size_t pos = 0; pos < bytes.size();) {
        const char dir_byte = bytes[pos];
        std::uint32_t len = 0;
        for (int k = 0; k < 4; ++k) len |= std::uint32_t(static_cast<unsigned char>(bytes[pos + 1 + k])) << (8 * k);
        std::vector<std::byte> frame(len);
        std::memcpy(frame.data(), bytes.data() + pos + 5, len);
        records.emplace_back(dir_byte, std::move(frame));
        pos += 5 + len;
    }
    REQUIRE(records.size() == 10);  // handshake, 3 predicts, shutdown; each sent and received

    auto [a, b] = make_stream_pair();
    std::thread t([&, srv = std::move(b)]() mutable { serve(*srv, handler); });
    for (std::size_t k = 0; k < records.size(); k += 2) {
        CHECK(records[k].first == '>');
        CHECK(records[k + 1].first == '<');
        a->write_all(records[k].second);
        CHECK(encode_frame(read_frame(*a)) == records[k + 1].second);
    }
    t.join();
}

TEST_CASE("a bridge-backed pipeline matches the in-process denoiser bit for bit") {
    const Shape s{1, 8, 8};
    auto cfg = PipelineConfig::fbsdiffpp_defaults();
    cfg.steps = 10;
    const auto z0 = harness::toy_source(s, 3);
    auto local = harness::toy_denoiser(s);
    const auto want = run_fbsdiffpp(z0, cfg, *local);

    auto remote_model = harness::toy_denoiser(s);
    Loopback lb([&](const Frame& req) -> Frame {
        const auto op = req.header.at("op").get<std::string>();
        if (op == "handshake") {
            Frame r;
            r.header["n_train"] = 1000;
            r.header["alpha_bar"] = linear_table(1000);
            return r;
        }
        if (op == "predict_eps")
            return tensor_frame(op, remote_model->predict(frame_tensor(req), req.header.at("timestep").get<Timestep>(),
                                                          parse_cond_id(req.header.at("cond").get<std::string>())));
        return Frame{};
    });
    auto info = lb.client->handshake(s, 1000);
    cfg.alpha_bar = info.alpha_bar;
    BridgeDenoiser d(*lb.client);
    const auto got = run_fbsdiffpp(z0, cfg, d);
    CHECK(got.output == want.output);
    CHECK(got.denoiser_calls == CallCounts{20, 10});
}
