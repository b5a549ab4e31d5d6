#ifndef FLGAUGE_H
#define FLGAUGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every function.
 */
typedef enum FlgStatus {
  FLG_STATUS_OK = 0,
  FLG_STATUS_NULL_POINTER = 1,
  FLG_STATUS_INVALID_UTF8 = 2,
  FLG_STATUS_PARSE = 3,
  FLG_STATUS_INVALID_ARGUMENT = 4,
  /*
   a mathematical check failed or an input is outside the certified range
   */
  FLG_STATUS_MATH = 5,
  FLG_STATUS_BUFFER_TOO_SMALL = 6,
  FLG_STATUS_PANIC = 7,
} FlgStatus;

/*
 An FL module over W(F_q)/p^N.
 */
typedef struct FlgModule FlgModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the message of the last error on this thread into `buf`.

 # Safety
 `buf` must point to `cap` writable bytes or be null; `needed` may be null.
 */
enum FlgStatus flg_last_error(char *buf, size_t cap, size_t *needed);

/*
 Parses a module document (kind fl) into a new handle.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlgStatus flg_module_parse(const char *text, struct FlgModule **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `m` must come from this library and not be used afterwards.
 */
void flg_module_free(struct FlgModule *m);

/*
 Writes the canonical text of `m`.

 # Safety
 `m` must be a live handle; `buf` must point to `cap` writable bytes or be null.
 */
enum FlgStatus flg_module_emit(const struct FlgModule *m, char *buf, size_t cap, size_t *needed);

/*
 Runs the FL validation; `passed` receives the verdict.

 # Safety
 `m` must be a live handle and `passed` a valid pointer.
 */
enum FlgStatus flg_module_validate(const struct FlgModule *m, bool *passed);

/*
 F_p-dimensions of Hom and Ext^1 from `m` to `n`, both killed by p.

 # Safety
 Handles must be live and output pointers valid.
 */
enum FlgStatus flg_hom_ext1(const struct FlgModule *m,
                            const struct FlgModule *n,
                            size_t *hom,
                            size_t *ext1);

/*
 Lengths (sums of elementary-divisor exponents) of syntomic H0 and H1 in weight `i`.

 # Safety
 `m` must be a live handle and output pointers valid.
 */
enum FlgStatus flg_syntomic_lengths(const struct FlgModule *m,
                                    size_t i,
                                    uint64_t *h0,
                                    uint64_t *h1);

/*
 The Tate twist of `m` by `i` as a new handle.

 # Safety
 `m` must be a live handle and `out` a valid pointer.
 */
enum FlgStatus flg_module_twist(const struct FlgModule *m, size_t i, struct FlgModule **out);

/*
 The torsion-free lift of a module killed by p, as a new handle.

 # Safety
 `m` must be a live handle and `out` a valid pointer.
 */
enum FlgStatus flg_module_lift(const struct FlgModule *m, struct FlgModule **out);

/*
 Applies (F, φ) -> (F, φ(1 - α)) to a module killed by p.

 # Safety
 `m` must be a live handle and `out` a valid pointer.
 */
enum FlgStatus flg_sen_apply(const struct FlgModule *m, struct FlgModule **out);

/*
 Class t of an extension of k{p-1} by k{0}: its f coefficients go to `coeffs`
 (capacity `cap`), and `splits` tells whether the extension splits.

 # Safety
 `m` must be a live handle; `coeffs` must point to `cap` writable values.
 */
enum FlgStatus flg_extension_class(const struct FlgModule *m,
                                   uint64_t *coeffs,
                                   size_t cap,
                                   bool *splits);

/*
 The Mazur number [n] for the prime p.

 # Safety
 `out` must be a valid pointer.
 */
enum FlgStatus flg_mazur_number(uint64_t p, int64_t n, uint64_t *out);

/*
 Runs acceptance criterion `id` (1 to 11).

 # Safety
 `passed` must be a valid pointer.
 */
enum FlgStatus flg_acceptance_criterion(uint8_t id, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLGAUGE_H */
