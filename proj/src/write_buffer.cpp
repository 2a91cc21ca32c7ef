#include "nvsim/write_buffer.hpp"

#include <algorithm>
#include <cstring>

#include "nvsim/error.hpp"

namespace nvsim {

WriteBuffer::Entry* WriteBuffer::find(std::uint64_t page_index) {
    for (auto& e : entries_)
        if (e.page_index == page_index) return &e;
    return nullptr;
}

const WriteBuffer::Entry* WriteBuffer::find(std::uint64_t page_index) const {
    for (const auto& e : entries_)
        if (e.page_index == page_index) return &e;
    return nullptr;
}

bool WriteBuffer::hasPage(std::uint64_t page_index) const {
    return find(page_index) != nullptr;
}

bool WriteBuffer::hasLine(std::uint64_t page_index, std::uint32_t line) const {
    const Entry* e = find(page_index);
    return e != nullptr && e->lines.test(line);
}

const std::uint8_t* WriteBuffer::lineData(std::uint64_t page_index,
                                          std::uint32_t line) const {
    const Entry* e = find(page_index);
    if (e == nullptr || !e->lines.test(line)) return nullptr;
    return e->data.bytes.data() + line * kLineBytes;
}

WriteBuffer::EnqueueResult WriteBuffer::allocate(Entry entry) {
    EnqueueResult result;
    if (entries_.size() == capacity_) {
        result.forced_drain = entries_.front();
        entries_.pop_front();
    }
    entries_.push_back(std::move(entry));
    return result;
}

WriteBuffer::EnqueueResult WriteBuffer::enqueue(
    std::uint64_t page_index, std::uint32_t line,
    std::span<const std::uint8_t, kLineBytes> data) {
    if (Entry* e = find(page_index)) {
        e->lines.set(line);
        std::memcpy(e->data.bytes.data() + line * kLineBytes, data.data(),
                    kLineBytes);
        return {.merged = true, .forced_drain = std::nullopt};
    }
    Entry entry;
    entry.page_index = page_index;
    entry.lines.set(line);
    std::memcpy(entry.data.bytes.data() + line * kLineBytes, data.data(),
                kLineBytes);
    return allocate(std::move(entry));
}

WriteBuffer::EnqueueResult WriteBuffer::enqueuePage(std::uint64_t page_index,
                                                    const Page& data) {
    if (Entry* e = find(page_index)) {
        e->lines.set();
        e->data = data;
        return {.merged = true, .forced_drain = std::nullopt};
    }
    Entry entry;
    entry.page_index = page_index;
    entry.lines.set();
    entry.data = data;
    return allocate(std::move(entry));
}

WriteBuffer::Entry WriteBuffer::take(std::uint64_t page_index) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const Entry& e) {
                               return e.page_index == page_index;
                           });
    if (it == entries_.end())
        throw SimError(ErrorCode::PageAbsent,
                       "page not present in write buffer");
    Entry entry = std::move(*it);
    entries_.erase(it);
    return entry;
}

WriteBuffer::Entry WriteBuffer::takeOldest() {
    if (entries_.empty())
        throw SimError(ErrorCode::PageAbsent, "write buffer is empty");
    Entry entry = std::move(entries_.front());
    entries_.pop_front();
    return entry;
}

} // namespace nvsim
