#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowrecom {

enum class Errc {
  DisconnectedGraph,
  DuplicateEdge,
  UnknownEndpoint,
  DuplicateNode,
  InvalidNode,
  InvalidPartition,
  UnknownDistrict,
  MissingOriginStats,
  ZeroDevices,
  EmptyList,
  WeightsNotNormalized,
  NegativeWeight,
  ZeroInterFlows,
  ProposalOutsideMergedRegion,
  NonpositiveGeometry,
  ZeroVoteDistrict,
  TiedDistrict,
  NoCutEdges,
  DisconnectedSubgraph,
  EmptyCandidates,
  RetriesExhausted,
  InvalidConfig,
  InvalidSeedPlan,
  StepStalled,
  CorruptCheckpoint,
  UnknownField,
  EmptySample,
  DigestMismatch,
  UnknownUnitInAssignment,
  MissingGeometry,
  ParseError,
  IoError,
};

std::string_view errc_name(Errc code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace flowrecom
