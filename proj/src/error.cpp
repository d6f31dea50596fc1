#include "flowrecom/error.hpp"

namespace flowrecom {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::UnknownEndpoint: return "UnknownEndpoint";
    case Errc::DuplicateNode: return "DuplicateNode";
    case Errc::InvalidNode: return "InvalidNode";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::UnknownDistrict: return "UnknownDistrict";
    case Errc::MissingOriginStats: return "MissingOriginStats";
    case Errc::ZeroDevices: return "ZeroDevices";
    case Errc::EmptyList: return "EmptyList";
    case Errc::WeightsNotNormalized: return "WeightsNotNormalized";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::ZeroInterFlows: return "ZeroInterFlows";
    case Errc::ProposalOutsideMergedRegion: return "ProposalOutsideMergedRegion";
    case Errc::NonpositiveGeometry: return "NonpositiveGeometry";
    case Errc::ZeroVoteDistrict: return "ZeroVoteDistrict";
    case Errc::TiedDistrict: return "TiedDistrict";
    case Errc::NoCutEdges: return "NoCutEdges";
    case Errc::DisconnectedSubgraph: return "DisconnectedSubgraph";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::RetriesExhausted: return "RetriesExhausted";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidSeedPlan: return "InvalidSeedPlan";
    case Errc::StepStalled: return "StepStalled";
    case Errc::CorruptCheckpoint: return "CorruptCheckpoint";
    case Errc::UnknownField: return "UnknownField";
    case Errc::EmptySample: return "EmptySample";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::UnknownUnitInAssignment: return "UnknownUnitInAssignment";
    case Errc::MissingGeometry: return "MissingGeometry";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace flowrecom
