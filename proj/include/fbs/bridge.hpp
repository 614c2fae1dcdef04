// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fbs/denoiser.hpp"
#include "fbs/tensor.hpp"

// Client side of the model bridge: a strict request/response frame protocol
// over a byte stream.
//
//   frame   = u32 LE header length | UTF-8 JSON header | raw payload
//   header  = { "op", "shape": [c,h,w], "dtype": "f32"|"f64", "timestep",
//               "cond", "payload_bytes", ... }
//   payload = row-major (c, i, j) little-endian floats
//
// Responses carry "status": "ok" | "error"; errors add "error_kind"
// ("protocol" | "remote") and "message". The handshake response carries
// "n_train" and the full "alpha_bar" table (t = 1..n_train).
namespace fbs::bridge {

inline constexpr std::uint32_t kMaxHeaderBytes = 64u << 20;

class Stream {
public:
    virtual ~Stream() = default;
    /// Throws TransportError on failure or EOF.
    virtual void write_all(std::span<const std::byte> bytes) = 0;
    virtual void read_exact(std::span<std::byte> bytes) = 0;
};

/// Stream over POSIX descriptors (a socket, or a pipe pair to a child's stdio).
class FdStream final : public Stream {
public:
    FdStream(int read_fd, int write_fd);
    explicit FdStream(int socket_fd) : FdStream(socket_fd, socket_fd) {}
    ~FdStream() override;
    FdStream(const FdStream&) = delete;
    FdStream& operator=(const FdStream&) = delete;

    void write_all(std::span<const std::byte> bytes) override;
    void read_exact(std::span<std::byte> bytes) override;
    /// Half-closes the write side so the peer sees EOF.
    void close_write();

private:
    int read_fd_;
    int write_fd_;
};

/// Connects to "unix:/path/to.sock" or "tcp:host:port".
std::unique_ptr<Stream> connect(const std::string& address);

/// Two connected in-process endpoints (AF_UNIX socketpair).
std::pair<std::unique_ptr<FdStream>, std::unique_ptr<FdStream>> make_stream_pair();

enum class Dtype { f32, f64 };

struct Frame {
    nlohmann::json header = nlohmann::json::object();
    std::vector<std::byte> payload;
};

/// Sets header["payload_bytes"] from the payload before writing.
void write_frame(Stream& s, Frame frame);
Frame read_frame(Stream& s);

Frame tensor_frame(std::string op, const LatentFeature& t, Dtype dtype = Dtype::f64);
/// Decodes shape/dtype/payload from a frame header; throws ProtocolError on
/// inconsistency or non-finite values.
LatentFeature frame_tensor(const Frame& f);

struct HandshakeInfo {
    std::size_t n_train = 0;
    std::vector<double> alpha_bar;  // t = 1..n_train
};

class BridgeClient {
public:
    explicit BridgeClient(std::unique_ptr<Stream> stream);
    ~BridgeClient();

    /// Agrees latent shape, conditioning ids and schedule length. Throws
    /// ProtocolError if the server's n_train differs from `n_train`.
    HandshakeInfo handshake(const Shape& latent_shape, std::size_t n_train);

    LatentFeature predict_eps(const LatentFeature& z_t, Timestep t, CondId cond);
    LatentFeature encode(const LatentFeature& pixels);
    LatentFeature decode(const LatentFeature& latent);
    void shutdown();

    bool handshaken() const noexcept { return info_.has_value(); }
    std::uint64_t requests() const noexcept { return requests_; }

    /// Appends every frame sent and received to `path`. Record format:
    /// direction byte ('>' sent, '<' received), u32 LE frame length, frame bytes.
    void record_transcript(const std::filesystem::path& path);

private:
    Frame roundtrip(Frame request);
    void record(char direction, const Frame& f);

    std::unique_ptr<Stream> stream_;
    std::optional<HandshakeInfo> info_;
    std::optional<Shape> shape_;
    std::uint64_t requests_ = 0;
    std::unique_ptr<std::ofstream> transcript_;
};

/// Denoiser backed by a remote model. Does not retry; a TransportError
/// propagates to the caller.
class BridgeDenoiser final : public Denoiser {
public:
    explicit BridgeDenoiser(BridgeClient& client) : client_(client) {}

protected:
    LatentFeature do_predict(const LatentFeature& z_t, Timestep t, CondId cond) override;

private:
    BridgeClient& client_;
};

/// Minimal serve loop: reads frames, answers each with `handler`, exits after
/// replying to "shutdown" or when the peer closes. A handler exception becomes
/// a remote-error response; an unparseable frame becomes a protocol-error
/// response and the loop continues where framing allows.
void serve(Stream& s, const std::function<Frame(const Frame&)>& handler);

/// Serialized frame bytes, as written on the wire.
std::vector<std::byte> encode_frame(Frame frame);

}  // namespace fbs::bridge
