#pragma once

#include <stdexcept>
#include <string>

namespace casbridge {

/// Base of every error raised by the library. `kind()` is the stable error
/// tag that appears on the wire and in CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)), detail_(message) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string kind_;
  std::string detail_;
};

#define CASBRIDGE_DEFINE_ERROR(NAME)                                   \
  class NAME : public ::casbridge::Error {                             \
   public:                                                             \
    explicit NAME(const std::string& message) : Error(#NAME, message) {} \
  }

// kernel
CASBRIDGE_DEFINE_ERROR(NotANumeral);
CASBRIDGE_DEFINE_ERROR(ElaborationFailure);
CASBRIDGE_DEFINE_ERROR(TypeMismatch);
CASBRIDGE_DEFINE_ERROR(TypeError);
CASBRIDGE_DEFINE_ERROR(DuplicateName);
CASBRIDGE_DEFINE_ERROR(UnknownDeclaration);
CASBRIDGE_DEFINE_ERROR(SyntaxError);

// cas
CASBRIDGE_DEFINE_ERROR(ParseError);
CASBRIDGE_DEFINE_ERROR(WireError);
CASBRIDGE_DEFINE_ERROR(StepBudgetExceeded);
CASBRIDGE_DEFINE_ERROR(NotAPolynomial);
CASBRIDGE_DEFINE_ERROR(UnsupportedShape);
CASBRIDGE_DEFINE_ERROR(ZeroPivot);
CASBRIDGE_DEFINE_ERROR(NotSquare);
CASBRIDGE_DEFINE_ERROR(UnsupportedFragment);
CASBRIDGE_DEFINE_ERROR(NoCertificate);
CASBRIDGE_DEFINE_ERROR(EvalError);

// bridge
CASBRIDGE_DEFINE_ERROR(MalformedReflection);
CASBRIDGE_DEFINE_ERROR(BinderDepthError);
CASBRIDGE_DEFINE_ERROR(NoApplicableRule);

// tactics
CASBRIDGE_DEFINE_ERROR(RingNormalizationFailed);
CASBRIDGE_DEFINE_ERROR(OracleFailed);
CASBRIDGE_DEFINE_ERROR(CertificateRejected);
CASBRIDGE_DEFINE_ERROR(NotGround);
CASBRIDGE_DEFINE_ERROR(UnsupportedSystem);
CASBRIDGE_DEFINE_ERROR(NoSolution);
CASBRIDGE_DEFINE_ERROR(VerificationFailed);
CASBRIDGE_DEFINE_ERROR(StageError);

// prover
CASBRIDGE_DEFINE_ERROR(UnsupportedProofConstant);
CASBRIDGE_DEFINE_ERROR(IllTypedProof);
CASBRIDGE_DEFINE_ERROR(TranslationFailed);
CASBRIDGE_DEFINE_ERROR(TacticFailed);

// link
CASBRIDGE_DEFINE_ERROR(LinkDown);
CASBRIDGE_DEFINE_ERROR(RemoteError);

}  // namespace casbridge
