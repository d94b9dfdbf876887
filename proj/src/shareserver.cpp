#include "splitauth/shareserver.hpp"

#include "splitauth/hex.hpp"

namespace splitauth {

namespace {

bool well_formed_share(const DigestShare& share) {
    if (share.total < 1) return false;
    if (share.mode == SplitMode::Segment && share.total > PasswordDigest::kSize) return false;
    if (share.index < 1 || share.index > share.total) return false;
    std::size_t want = share.mode == SplitMode::Segment
                           ? segment_payload_size(share.index, share.total)
                           : PasswordDigest::kSize;
    return share.payload.size() == want;
}

} // namespace

Message shareserver_on_message(const Message& message, ShareStore& store) {
    if (const auto* put = std::get_if<MsgSharePut>(&message)) {
        DigestShare share;
        try {
            share = share_from_message(*put);
        } catch (const std::invalid_argument&) {
            return MsgSharePutErr{"malformed"};
        }
        if (!well_formed_share(share)) {
            return MsgSharePutErr{"malformed"};
        }
        try {
            switch (store.put(put->username, share)) {
            case StorePutResult::Stored:
            case StorePutResult::Unchanged:
                return MsgSharePutOk{};
            case StorePutResult::Conflict:
                return MsgSharePutErr{"exists"};
            }
        } catch (const StoreError&) {
            return MsgSharePutErr{"storage"};
        }
    }

    if (const auto* get = std::get_if<MsgShareGet>(&message)) {
        if (auto share = store.get(get->username)) {
            return share_to_message(*share);
        }
        return MsgShareMissing{};
    }

    if (const auto* del = std::get_if<MsgShareDel>(&message)) {
        try {
            store.del(del->username);
        } catch (const StoreError&) {
            return MsgSharePutErr{"storage"};
        }
        return MsgShareDelOk{};
    }

    return MsgSharePutErr{"protocol"};
}

} // namespace splitauth
