// Copyright 2026 The optimeta-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optimeta {

/// Every failure raised by the library carries one of these codes. The
/// service layer maps them onto HTTP statuses; the CLI prints them.
enum class Errc {
  // citation_core / enrich_clients
  MalformedDoi,
  TransportError,
  RateLimited,
  SchemaError,
  UnknownField,
  InvalidOrcid,
  // geo_core
  ParseError,
  UnsupportedGeometry,
  CoordinateOutOfRange,
  OpenRing,
  InvalidLicence,
  EmptyExtent,
  ReversedInterval,
  MixedPrecision,
  // gazetteer
  GazetteerUnavailable,
  UnknownUnit,
  PreconditionViolated,
  // meta_emit
  MissingAdminPath,
  NoExtent,
  // deposit
  NoCitingDoi,
  NothingToDeposit,
  AuthError,
  RemoteRejected,
  // service
  StorageCorrupt,
  NotFound,
  IllegalTransition,
  InvalidReference,
  Unauthorized,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedDoi: return "MalformedDoi";
    case Errc::TransportError: return "TransportError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::SchemaError: return "SchemaError";
    case Errc::UnknownField: return "UnknownField";
    case Errc::InvalidOrcid: return "InvalidOrcid";
    case Errc::ParseError: return "ParseError";
    case Errc::UnsupportedGeometry: return "UnsupportedGeometry";
    case Errc::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case Errc::OpenRing: return "OpenRing";
    case Errc::InvalidLicence: return "InvalidLicence";
    case Errc::EmptyExtent: return "EmptyExtent";
    case Errc::ReversedInterval: return "ReversedInterval";
    case Errc::MixedPrecision: return "MixedPrecision";
    case Errc::GazetteerUnavailable: return "GazetteerUnavailable";
    case Errc::UnknownUnit: return "UnknownUnit";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::MissingAdminPath: return "MissingAdminPath";
    case Errc::NoExtent: return "NoExtent";
    case Errc::NoCitingDoi: return "NoCitingDoi";
    case Errc::NothingToDeposit: return "NothingToDeposit";
    case Errc::AuthError: return "AuthError";
    case Errc::RemoteRejected: return "RemoteRejected";
    case Errc::StorageCorrupt: return "StorageCorrupt";
    case Errc::NotFound: return "NotFound";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::InvalidReference: return "InvalidReference";
    case Errc::Unauthorized: return "Unauthorized";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

/// Transport-class failures: the request may succeed when retried later.
constexpr bool is_transient(Errc code) noexcept {
  return code == Errc::TransportError || code == Errc::RateLimited ||
         code == Errc::GazetteerUnavailable;
}

}  // namespace optimeta
