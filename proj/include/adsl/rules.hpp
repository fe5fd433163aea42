#pragma once

#include <span>
#include <string_view>

// Frozen diagnostic rule catalog. Ids are stable strings; docs/rules.md
// describes each one.
namespace adsl::rules {

inline constexpr std::string_view kParseLex = "PARSE-LEX";
inline constexpr std::string_view kParseSyntax = "PARSE-SYNTAX";
inline constexpr std::string_view kParseDup = "PARSE-DUP";

inline constexpr std::string_view kSemUndef = "SEM-UNDEF";
inline constexpr std::string_view kSemDup = "SEM-DUP";
inline constexpr std::string_view kSemKind = "SEM-KIND";
inline constexpr std::string_view kSemArity = "SEM-ARITY";
inline constexpr std::string_view kSemDtype = "SEM-DTYPE";
inline constexpr std::string_view kSemSpace = "SEM-SPACE";
inline constexpr std::string_view kSemShape = "SEM-SHAPE";
inline constexpr std::string_view kSemBlocksExceedCores = "SEM-BLOCKS-EXCEED-CORES";

inline constexpr std::string_view kStgG2lPlace = "STG-G2L-PLACE";
inline constexpr std::string_view kStgL2gPlace = "STG-L2G-PLACE";
inline constexpr std::string_view kStgComputePlace = "STG-COMPUTE-PLACE";
inline constexpr std::string_view kStgGmInCompute = "STG-GM-IN-COMPUTE";
inline constexpr std::string_view kStgUseBeforeDef = "STG-USE-BEFORE-DEF";
inline constexpr std::string_view kStgUnconsumed = "STG-UNCONSUMED";
inline constexpr std::string_view kStgSyncPlace = "STG-SYNC-PLACE";
inline constexpr std::string_view kStgNested = "STG-NESTED";

inline constexpr std::string_view kBufUbOverflow = "BUF-UB-OVERFLOW";
inline constexpr std::string_view kBufL1Overflow = "BUF-L1-OVERFLOW";
inline constexpr std::string_view kBufSliceOob = "BUF-SLICE-OOB";
inline constexpr std::string_view kBufRole = "BUF-ROLE";
inline constexpr std::string_view kBufCount = "BUF-COUNT";
inline constexpr std::string_view kBufNonPos = "BUF-NONPOS";
inline constexpr std::string_view kBufLocalAlign = "BUF-LOCAL-ALIGN";

inline constexpr std::string_view kTilNonPos = "TIL-NONPOS";
inline constexpr std::string_view kTilGap = "TIL-GAP";
inline constexpr std::string_view kTilOverlap = "TIL-OVERLAP";
inline constexpr std::string_view kTilRationale = "TIL-RATIONALE";
inline constexpr std::string_view kTilCycle = "TIL-CYCLE";

inline constexpr std::string_view kKrnEval = "KRN-EVAL";

inline constexpr std::string_view kTgtStageMix = "TGT-STAGE-MIX";
inline constexpr std::string_view kTgtDeqFirst = "TGT-DEQ-FIRST";
inline constexpr std::string_view kTgtQueueImbalance = "TGT-QUEUE-IMBALANCE";
inline constexpr std::string_view kTgtGmInCompute = "TGT-GM-IN-COMPUTE";
inline constexpr std::string_view kTgtBarrierPlace = "TGT-BARRIER-PLACE";
inline constexpr std::string_view kTgtUndeclared = "TGT-UNDECLARED";
inline constexpr std::string_view kTgtCall = "TGT-CALL";

inline constexpr std::string_view kAll[] = {
    kParseLex,      kParseSyntax,       kParseDup,        kSemUndef,        kSemDup,
    kSemKind,       kSemArity,          kSemDtype,        kSemSpace,        kSemShape,
    kSemBlocksExceedCores,              kStgG2lPlace,     kStgL2gPlace,     kStgComputePlace,
    kStgGmInCompute, kStgUseBeforeDef,  kStgUnconsumed,   kStgSyncPlace,    kStgNested,
    kBufUbOverflow, kBufL1Overflow,     kBufSliceOob,     kBufRole,         kBufCount,
    kBufNonPos,     kBufLocalAlign,     kTilNonPos,         kTilGap,          kTilOverlap,      kTilRationale,
    kTilCycle,      kKrnEval,           kTgtStageMix,     kTgtDeqFirst,     kTgtQueueImbalance,
    kTgtGmInCompute, kTgtBarrierPlace,  kTgtUndeclared,   kTgtCall,
};

constexpr bool in_catalog(std::string_view id) {
    for (auto r : kAll) {
        if (r == id) return true;
    }
    return false;
}

}  // namespace adsl::rules
