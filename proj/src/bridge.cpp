// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "fbs/bridge.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fbs/errors.hpp"
#include "fbs/tensor_io.hpp"

namespace fbs::bridge {
namespace {

using json = nlohmann::json;

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

std::uint32_t read_u32_le(const std::byte* p) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t{std::to_integer<std::uint8_t>(p[b])} << (8 * b);
    return v;
}

void put_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xFFu));
}

Shape parse_shape(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ProtocolError("frame shape must be [c, h, w]");
    for (const auto& d : j) {
        if (!d.is_number_unsigned()) throw ProtocolError("frame shape entries must be unsigned");
    }
    return Shape{j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
}

json shape_json(const Shape& s) { return json::array({s.channels, s.height, s.width}); }

void check_ok(const Frame& response, const std::string& op) {
    const auto& h = response.header;
    const auto status = h.value("status", std::string{});
    if (status == "error") {
        const auto kind = h.value("error_kind", std::string{"remote"});
        const auto msg = h.value("message", std::string{"(no message)"});
        if (kind == "protocol") throw ProtocolError("bridge rejected " + op + ": " + msg);
        throw RemoteError("bridge " + op + " failed: " + msg);
    }
    if (status != "ok") throw ProtocolError("bridge response to " + op + " lacks status ok");
    if (h.value("op", std::string{}) != op) {
        throw ProtocolError("bridge answered '" + h.value("op", std::string{}) + "' to '" + op +
                            "' (frame desync)");
    }
}

}  // namespace

FdStream::FdStream(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

FdStream::~FdStream() {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

void FdStream::write_all(std::span<const std::byte> bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        ssize_t n = ::send(write_fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
        if (n < 0 && errno == ENOTSOCK) n = ::write(write_fd_, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(errno_text("bridge write"));
        }
        done += static_cast<std::size_t>(n);
    }
}

void FdStream::read_exact(std::span<std::byte> bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::read(read_fd_, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(errno_text("bridge read"));
        }
        if (n == 0) throw TransportError("bridge connection closed by peer");
        done += static_cast<std::size_t>(n);
    }
}

void FdStream::close_write() { ::shutdown(write_fd_, SHUT_WR); }

std::unique_ptr<Stream> connect(const std::string& address) {
    if (address.rfind("unix:", 0) == 0) {
        const std::string path = address.substr(5);
        sockaddr_un sa{};
        sa.sun_family = AF_UNIX;
        if (path.empty() || path.size() >= sizeof(sa.sun_path)) {
            throw TransportError("bad unix socket path '" + path + "'");
        }
        std::memcpy(sa.sun_path, path.c_str(), path.size() + 1);
        const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError(errno_text("socket"));
        if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
            const auto msg = errno_text(("connect " + address).c_str());
            ::close(fd);
            throw TransportError(msg);
        }
        return std::make_unique<FdStream>(fd);
    }
    if (address.rfind("tcp:", 0) == 0) {
        const std::string rest = address.substr(4);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos) throw TransportError("tcp address needs host:port");
        const std::string host = rest.substr(0, colon);
        const std::string port = rest.substr(colon + 1);
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
            throw TransportError("resolve " + address + ": " + ::gai_strerror(rc));
        }
        std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
        for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
            const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) return std::make_unique<FdStream>(fd);
            ::close(fd);
        }
        throw TransportError("cannot connect to " + address);
    }
    throw TransportError("unsupported bridge address '" + address +
                         "' (expected unix:/path or tcp:host:port)");
}

std::pair<std::unique_ptr<FdStream>, std::unique_ptr<FdStream>> make_stream_pair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) throw TransportError(errno_text("socketpair"));
    return {std::make_unique<FdStream>(fds[0]), std::make_unique<FdStream>(fds[1])};
}

std::vector<std::byte> encode_frame(Frame frame) {
    frame.header["payload_bytes"] = frame.payload.size();
    const std::string text = frame.header.dump();
    std::vector<std::byte> out;
    out.reserve(4 + text.size() + frame.payload.size());
    put_u32_le(out, static_cast<std::uint32_t>(text.size()));
    for (char c : text) out.push_back(static_cast<std::byte>(c));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

void write_frame(Stream& s, Frame frame) { s.write_all(encode_frame(std::move(frame))); }

Frame read_frame(Stream& s) {
    std::byte len_bytes[4];
    s.read_exact(len_bytes);
    const std::uint32_t len = read_u32_le(len_bytes);
    if (len > kMaxHeaderBytes) throw ProtocolError("frame header length " + std::to_string(len) + " too large");
    std::string text(len, '\0');
    s.read_exact(std::as_writable_bytes(std::span<char>(text)));
    Frame f;
    f.header = json::parse(text, nullptr, false);
    if (f.header.is_discarded() || !f.header.is_object()) {
        throw ProtocolError("frame header is not a JSON object");
    }
    const auto it = f.header.find("payload_bytes");
    if (it == f.header.end() || !it->is_number_unsigned()) {
        throw ProtocolError("frame header lacks unsigned payload_bytes");
    }
    f.payload.resize(it->get<std::size_t>());
    s.read_exact(f.payload);
    return f;
}

Frame tensor_frame(std::string op, const LatentFeature& t, Dtype dtype) {
    Frame f;
    f.header["op"] = std::move(op);
    f.header["shape"] = shape_json(t.shape());
    f.header["dtype"] = dtype == Dtype::f64 ? "f64" : "f32";
    if (dtype == Dtype::f64) {
        append_f64_le(f.payload, t.values());
    } else {
        append_f32_le(f.payload, t.values());
    }
    return f;
}

LatentFeature frame_tensor(const Frame& f) {
    const auto shape = parse_shape(f.header.value("shape", json()));
    const auto dtype = f.header.value("dtype", std::string{});
    std::size_t width = 0;
    if (dtype == "f64") {
        width = 8;
    } else if (dtype == "f32") {
        width = 4;
    } else {
        throw ProtocolError("unsupported payload dtype '" + dtype + "'");
    }
    if (f.payload.size() != shape.numel() * width) {
        throw ProtocolError("payload of " + std::to_string(f.payload.size()) +
                            " bytes does not match shape " + to_string(shape) + " (" + dtype + ")");
    }
    auto values = width == 8 ? read_f64_le(f.payload) : read_f32_le(f.payload);
    try {
        LatentFeature t(shape, std::move(values));
        if (!t.all_finite()) throw ProtocolError("bridge payload contains non-finite values");
        return t;
    } catch (const ShapeError& e) {
        throw ProtocolError(std::string("bridge payload: ") + e.what());
    }
}

BridgeClient::BridgeClient(std::unique_ptr<Stream> stream) : stream_(std::move(stream)) {}

BridgeClient::~BridgeClient() = default;

void BridgeClient::record_transcript(const std::filesystem::path& path) {
    transcript_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
    if (!*transcript_) throw TransportError("cannot open transcript " + path.string());
}

void BridgeClient::record(char direction, const Frame& f) {
    if (!transcript_) return;
    const auto bytes = encode_frame(f);
    std::vector<std::byte> rec;
    rec.push_back(static_cast<std::byte>(direction));
    put_u32_le(rec, static_cast<std::uint32_t>(bytes.size()));
    rec.insert(rec.end(), bytes.begin(), bytes.end());
    transcript_->write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
    transcript_->flush();
}

Frame BridgeClient::roundtrip(Frame request) {
    const auto op = request.header.at("op").get<std::string>();
    request.header["payload_bytes"] = request.payload.size();
    record('>', request);
    write_frame(*stream_, request);
    ++requests_;
    auto response = read_frame(*stream_);
    record('<', response);
    check_ok(response, op);
    return response;
}

HandshakeInfo BridgeClient::handshake(const Shape& latent_shape, std::size_t n_train) {
    Frame req;
    req.header["op"] = "handshake";
    req.header["shape"] = shape_json(latent_shape);
    req.header["dtype"] = "f64";
    req.header["n_train"] = n_train;
    req.header["cond_ids"] = json::array({"null_text", "target_text"});
    const auto resp = roundtrip(std::move(req));

    const auto& h = resp.header;
    if (!h.contains("n_train") || !h["n_train"].is_number_unsigned()) {
        throw ProtocolError("handshake response lacks n_train");
    }
    HandshakeInfo info;
    info.n_train = h["n_train"].get<std::size_t>();
    if (info.n_train != n_train) {
        throw ProtocolError("bridge schedule has n_train = " + std::to_string(info.n_train) +
                            ", expected " + std::to_string(n_train));
    }
    if (!h.contains("alpha_bar") || !h["alpha_bar"].is_array()) {
        throw ProtocolError("handshake response lacks alpha_bar");
    }
    info.alpha_bar = h["alpha_bar"].get<std::vector<double>>();
    if (info.alpha_bar.size() != info.n_train) {
        throw ProtocolError("alpha_bar table has " + std::to_string(info.alpha_bar.size()) +
                            " entries for n_train = " + std::to_string(info.n_train));
    }
    double prev = 1.0;
    for (double a : info.alpha_bar) {
        if (!(a > 0.0 && a < prev)) throw ProtocolError("alpha_bar table is not strictly decreasing in (0, 1)");
        prev = a;
    }
    shape_ = latent_shape;
    info_ = info;
    return info;
}

LatentFeature BridgeClient::predict_eps(const LatentFeature& z_t, Timestep t, CondId cond) {
    if (!info_) throw ProtocolError("predict_eps before handshake");
    if (z_t.shape() != *shape_) {
        throw ProtocolError("predict_eps shape " + to_string(z_t.shape()) +
                            " differs from handshake shape " + to_string(*shape_));
    }
    auto req = tensor_frame("predict_eps", z_t);
    req.header["timestep"] = t;
    req.header["cond"] = std::string(to_string(cond));
    const auto resp = roundtrip(std::move(req));
    auto eps = frame_tensor(resp);
    if (eps.shape() != z_t.shape()) {
        throw ProtocolError("bridge returned eps of shape " + to_string(eps.shape()));
    }
    return eps;
}

LatentFeature BridgeClient::encode(const LatentFeature& pixels) {
    if (!info_) throw ProtocolError("encode before handshake");
    auto latent = frame_tensor(roundtrip(tensor_frame("encode", pixels)));
    if (latent.shape() != *shape_) {
        throw ProtocolError("bridge encoded to " + to_string(latent.shape()) +
                            ", handshake agreed " + to_string(*shape_));
    }
    return latent;
}

LatentFeature BridgeClient::decode(const LatentFeature& latent) {
    if (!info_) throw ProtocolError("decode before handshake");
    return frame_tensor(roundtrip(tensor_frame("decode", latent)));
}

void BridgeClient::shutdown() {
    Frame req;
    req.header["op"] = "shutdown";
    roundtrip(std::move(req));
}

LatentFeature BridgeDenoiser::do_predict(const LatentFeature& z_t, Timestep t, CondId cond) {
    return client_.predict_eps(z_t, t, cond);
}

void serve(Stream& s, const std::function<Frame(const Frame&)>& handler) {
    for (;;) {
        Frame request;
        try {
            request = read_frame(s);
        } catch (const TransportError&) {
            return;
        } catch (const ProtocolError& e) {
            Frame err;
            err.header = {{"op", "error"}, {"status", "error"}, {"error_kind", "protocol"}, {"message", e.what()}};
            write_frame(s, std::move(err));
            continue;
        }
        const auto op = request.header.value("op", std::string{});
        Frame response;
        try {
            response = handler(request);
            response.header["op"] = op;
            if (!response.header.contains("status")) response.header["status"] = "ok";
        } catch (const ProtocolError& e) {
            response = Frame{};
            response.header = {{"op", op}, {"status", "error"}, {"error_kind", "protocol"}, {"message", e.what()}};
        } catch (const std::exception& e) {
            response = Frame{};
            response.header = {{"op", op}, {"status", "error"}, {"error_kind", "remote"}, {"message", e.what()}};
        }
        write_frame(s, std::move(response));
        if (op == "shutdown") return;
    }
}

}  // namespace fbs::bridge
