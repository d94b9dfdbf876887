#include "splitauth/frame.hpp"

#include <json.hpp>

namespace splitauth {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const Message& message) {
    ordered_json j;
    j["type"] = message_type_name(message);
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MsgRegister>) {
                j["username"] = m.username;
                j["digest_hex"] = m.digest_hex;
            } else if constexpr (std::is_same_v<T, MsgRegisterErr> ||
                                 std::is_same_v<T, MsgLoginErr> ||
                                 std::is_same_v<T, MsgSharePutErr>) {
                j["reason"] = m.reason;
            } else if constexpr (std::is_same_v<T, MsgLogin>) {
                j["username"] = m.username;
                j["client_nonce_hex"] = m.client_nonce_hex;
            } else if constexpr (std::is_same_v<T, MsgChallenge>) {
                j["server_nonce_hex"] = m.server_nonce_hex;
            } else if constexpr (std::is_same_v<T, MsgChallengeResponse>) {
                j["proof_hex"] = m.proof_hex;
            } else if constexpr (std::is_same_v<T, MsgLoginOk>) {
                j["server_proof_hex"] = m.server_proof_hex;
            } else if constexpr (std::is_same_v<T, MsgSharePut>) {
                j["username"] = m.username;
                j["index"] = m.index;
                j["total"] = m.total;
                j["mode"] = split_mode_name(m.mode);
                j["payload_hex"] = m.payload_hex;
            } else if constexpr (std::is_same_v<T, MsgShareGet> ||
                                 std::is_same_v<T, MsgShareDel>) {
                j["username"] = m.username;
            } else if constexpr (std::is_same_v<T, MsgShareData>) {
                j["index"] = m.index;
                j["total"] = m.total;
                j["mode"] = split_mode_name(m.mode);
                j["payload_hex"] = m.payload_hex;
            }
        },
        message);
    return j;
}

class FieldReader {
public:
    explicit FieldReader(const ordered_json& j) : j_(j) {}

    std::string str(const char* key) {
        const ordered_json& v = field(key);
        if (!v.is_string()) throw MessageError(std::string(key) + " must be a string");
        return v.get<std::string>();
    }

    std::uint32_t uint(const char* key) {
        const ordered_json& v = field(key);
        if (!v.is_number_unsigned()) {
            throw MessageError(std::string(key) + " must be an unsigned integer");
        }
        auto n = v.get<std::uint64_t>();
        if (n > 0xffffffffULL) throw MessageError(std::string(key) + " out of range");
        return static_cast<std::uint32_t>(n);
    }

    SplitMode mode(const char* key) {
        std::string name = str(key);
        try {
            return parse_split_mode(name);
        } catch (const std::invalid_argument&) {
            throw MessageError("unknown split mode: " + name);
        }
    }

    /// All members must have been consumed ("type" included).
    void finish() const {
        if (seen_ != j_.size()) throw MessageError("unexpected extra members");
    }

private:
    const ordered_json& field(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) throw MessageError(std::string("missing member ") + key);
        ++seen_;
        return *it;
    }

    const ordered_json& j_;
    std::size_t seen_ = 1; // "type"
};

Message message_from_json(const ordered_json& j) {
    if (!j.is_object()) throw MessageError("payload is not a JSON object");
    auto type_it = j.find("type");
    if (type_it == j.end() || !type_it->is_string()) {
        throw MessageError("missing type member");
    }
    const std::string type = type_it->get<std::string>();
    FieldReader r(j);

    Message m;
    if (type == "register") {
        MsgRegister v{r.str("username"), r.str("digest_hex")};
        m = v;
    } else if (type == "register_ok") {
        m = MsgRegisterOk{};
    } else if (type == "register_err") {
        m = MsgRegisterErr{r.str("reason")};
    } else if (type == "login") {
        m = MsgLogin{r.str("username"), r.str("client_nonce_hex")};
    } else if (type == "challenge") {
        m = MsgChallenge{r.str("server_nonce_hex")};
    } else if (type == "challenge_response") {
        m = MsgChallengeResponse{r.str("proof_hex")};
    } else if (type == "login_ok") {
        m = MsgLoginOk{r.str("server_proof_hex")};
    } else if (type == "login_err") {
        m = MsgLoginErr{r.str("reason")};
    } else if (type == "logout") {
        m = MsgLogout{};
    } else if (type == "logout_ok") {
        m = MsgLogoutOk{};
    } else if (type == "share_put") {
        m = MsgSharePut{r.str("username"), r.uint("index"), r.uint("total"), r.mode("mode"),
                        r.str("payload_hex")};
    } else if (type == "share_put_ok") {
        m = MsgSharePutOk{};
    } else if (type == "share_put_err") {
        m = MsgSharePutErr{r.str("reason")};
    } else if (type == "share_get") {
        m = MsgShareGet{r.str("username")};
    } else if (type == "share_data") {
        m = MsgShareData{r.uint("index"), r.uint("total"), r.mode("mode"), r.str("payload_hex")};
    } else if (type == "share_missing") {
        m = MsgShareMissing{};
    } else if (type == "share_del") {
        m = MsgShareDel{r.str("username")};
    } else if (type == "share_del_ok") {
        m = MsgShareDelOk{};
    } else {
        throw MessageError("unknown message type: " + type);
    }
    r.finish();
    validate_message(m);
    return m;
}

} // namespace

std::vector<std::uint8_t> encode_frame(const Message& message) {
    validate_message(message);
    const std::string payload = to_json(message).dump();
    if (payload.size() > kMaxFramePayload) {
        throw MessageError("frame payload exceeds 1 MiB cap");
    }
    std::vector<std::uint8_t> out;
    out.reserve(4 + payload.size());
    auto len = static_cast<std::uint32_t>(payload.size());
    out.push_back(static_cast<std::uint8_t>(len >> 24));
    out.push_back(static_cast<std::uint8_t>(len >> 16));
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> buffer) {
    DecodeResult result;
    if (buffer.size() < 4) {
        result.status = DecodeStatus::Incomplete;
        return result;
    }
    const std::uint32_t len = static_cast<std::uint32_t>(buffer[0]) << 24 |
                              static_cast<std::uint32_t>(buffer[1]) << 16 |
                              static_cast<std::uint32_t>(buffer[2]) << 8 |
                              static_cast<std::uint32_t>(buffer[3]);
    if (len > kMaxFramePayload) {
        result.status = DecodeStatus::Oversize;
        result.error = "declared frame length " + std::to_string(len) + " exceeds 1 MiB cap";
        return result;
    }
    if (buffer.size() < 4u + len) {
        result.status = DecodeStatus::Incomplete;
        return result;
    }

    const auto* begin = reinterpret_cast<const char*>(buffer.data()) + 4;
    ordered_json j = ordered_json::parse(begin, begin + len, nullptr, false);
    if (j.is_discarded()) {
        result.status = DecodeStatus::Malformed;
        result.error = "payload is not valid JSON";
        return result;
    }
    try {
        result.message = message_from_json(j);
    } catch (const MessageError& e) {
        result.status = DecodeStatus::Malformed;
        result.error = e.what();
        return result;
    }
    result.status = DecodeStatus::Ok;
    result.consumed = 4u + len;
    return result;
}

} // namespace splitauth
