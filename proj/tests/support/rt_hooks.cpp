#include "rt_hooks.hpp"

#include <dlfcn.h>
#include <pthread.h>

#include <cerrno>
#include <cstddef>
#include <cstdint>

extern "C" {
void* __libc_malloc(std::size_t);
void* __libc_calloc(std::size_t, std::size_t);
void* __libc_realloc(void*, std::size_t);
void* __libc_memalign(std::size_t, std::size_t);
void __libc_free(void*);
}

namespace {

thread_local bool t_tracking = false;
thread_local std::int64_t t_allocs = 0;
thread_local std::int64_t t_locks = 0;

inline void note_alloc() {
  if (t_tracking) ++t_allocs;
}
inline void note_lock() {
  if (t_tracking) ++t_locks;
}

using MutexFn = int (*)(pthread_mutex_t*);
using RwFn = int (*)(pthread_rwlock_t*);

template <class Fn>
Fn next_symbol(const char* name) {
  return reinterpret_cast<Fn>(dlsym(RTLD_NEXT, name));
}

MutexFn real_mutex_lock() {
  static MutexFn fn = next_symbol<MutexFn>("pthread_mutex_lock");
  return fn;
}
MutexFn real_mutex_trylock() {
  static MutexFn fn = next_symbol<MutexFn>("pthread_mutex_trylock");
  return fn;
}
RwFn real_rdlock() {
  static RwFn fn = next_symbol<RwFn>("pthread_rwlock_rdlock");
  return fn;
}
RwFn real_wrlock() {
  static RwFn fn = next_symbol<RwFn>("pthread_rwlock_wrlock");
  return fn;
}

// Resolve before any thread starts tracking.
[[maybe_unused]] const bool g_resolved = [] {
  real_mutex_lock();
  real_mutex_trylock();
  real_rdlock();
  real_wrlock();
  return true;
}();

} // namespace

extern "C" {

void* malloc(std::size_t n) {
  note_alloc();
  return __libc_malloc(n);
}
void* calloc(std::size_t n, std::size_t size) {
  note_alloc();
  return __libc_calloc(n, size);
}
void* realloc(void* p, std::size_t n) {
  note_alloc();
  return __libc_realloc(p, n);
}
void free(void* p) { __libc_free(p); }
void* memalign(std::size_t align, std::size_t n) {
  note_alloc();
  return __libc_memalign(align, n);
}
void* aligned_alloc(std::size_t align, std::size_t n) {
  note_alloc();
  return __libc_memalign(align, n);
}
int posix_memalign(void** out, std::size_t align, std::size_t n) {
  note_alloc();
  void* p = __libc_memalign(align, n);
  if (!p) return ENOMEM;
  *out = p;
  return 0;
}

int pthread_mutex_lock(pthread_mutex_t* m) {
  note_lock();
  return real_mutex_lock()(m);
}
int pthread_mutex_trylock(pthread_mutex_t* m) {
  note_lock();
  return real_mutex_trylock()(m);
}
int pthread_rwlock_rdlock(pthread_rwlock_t* l) {
  note_lock();
  return real_rdlock()(l);
}
int pthread_rwlock_wrlock(pthread_rwlock_t* l) {
  note_lock();
  return real_wrlock()(l);
}

} // extern "C"

namespace asr::test::rt {

void begin() {
  t_allocs = 0;
  t_locks = 0;
  t_tracking = true;
}

Counts end() {
  t_tracking = false;
  return {t_allocs, t_locks};
}

} // namespace asr::test::rt
