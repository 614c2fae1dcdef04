// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fbs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied value outside the operation's domain (bad threshold,
/// t = 0 for an x0 prediction, non-binary mask, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class TensorFormatError : public Error {
public:
    enum class Kind { io, bad_magic, truncated, shape_mismatch, non_finite, bad_shape };

    TensorFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Connection-level failure talking to the bridge. The request may be retried.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Peer violated the frame protocol or the handshake contract.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// The bridge reported an exception while serving a request.
class RemoteError : public Error {
public:
    using Error::Error;
};

}  // namespace fbs
