#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace gridauth {

// Error kinds shared across the library. Protocol rejections are values,
// not exceptions: the adversary harness treats them as data.
enum class Err {
    SingularCurve,
    GeneratorOffCurve,
    BadOrder,
    BadModulus,
    PointOffCurve,
    InvalidPoint,
    WidthMismatch,
    BadTemplateLength,
    StaleTimestamp,
    DuplicateRegistration,
    UnknownUser,
    AuthenticationFailure,
    LocalAuthFailure,
    MalformedMessage,
    IoError,
    BadConfig,
};

inline const char* err_name(Err e) {
    switch (e) {
        case Err::SingularCurve: return "SingularCurve";
        case Err::GeneratorOffCurve: return "GeneratorOffCurve";
        case Err::BadOrder: return "BadOrder";
        case Err::BadModulus: return "BadModulus";
        case Err::PointOffCurve: return "PointOffCurve";
        case Err::InvalidPoint: return "InvalidPoint";
        case Err::WidthMismatch: return "WidthMismatch";
        case Err::BadTemplateLength: return "BadTemplateLength";
        case Err::StaleTimestamp: return "StaleTimestamp";
        case Err::DuplicateRegistration: return "DuplicateRegistration";
        case Err::UnknownUser: return "UnknownUser";
        case Err::AuthenticationFailure: return "AuthenticationFailure";
        case Err::LocalAuthFailure: return "LocalAuthFailure";
        case Err::MalformedMessage: return "MalformedMessage";
        case Err::IoError: return "IoError";
        case Err::BadConfig: return "BadConfig";
    }
    return "UnknownError";
}

template <typename T>
class Result {
public:
    Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Result(Err e) : v_(std::in_place_index<1>, e) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        assert(ok());
        return std::get<0>(v_);
    }
    T& value() & {
        assert(ok());
        return std::get<0>(v_);
    }
    T&& value() && {
        assert(ok());
        return std::get<0>(std::move(v_));
    }
    Err error() const {
        assert(!ok());
        return std::get<1>(v_);
    }

private:
    std::variant<T, Err> v_;
};

template <>
class Result<void> {
public:
    Result() : err_(), ok_(true) {}
    Result(Err e) : err_(e), ok_(false) {}

    bool ok() const { return ok_; }
    explicit operator bool() const { return ok_; }
    Err error() const {
        assert(!ok_);
        return err_;
    }

private:
    Err err_;
    bool ok_;
};

}  // namespace gridauth
