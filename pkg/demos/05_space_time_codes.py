"""Algebraic space-time codes over relay channels.

Builds the 2x2 orthogonal design and the golden-ratio lattice code
(single and two-sub-channel parallel versions), verifies the
non-vanishing-determinant property exhaustively, and runs a short coded
error-rate simulation over a flip-and-forward channel.
"""

from relaydmt import QamAlphabet, alamouti, golden, simulate_ser, verify_nvd
from relaydmt.channel_sim import AfScheme, default_ff_scheme
from relaydmt.stbc import codebook_to_json

q4 = QamAlphabet.qam(4)
q16 = QamAlphabet.qam(16)

print("codebooks over 4-QAM:")
for cb in (alamouti(q4), golden(q4, m=0), golden(q4, m=1)):
    words, _ = cb.codewords()
    print(f"  {cb.name:<16} {len(words):>4} codewords, {cb.k_sub} sub-channel(s), "
          f"{cb.rate_syms_per_use:g} symbols/use")
print()

print("non-vanishing determinants (exhaustive over difference symbols):")
mn, _ = verify_nvd(alamouti(q4), q4.difference_points())
print(f"  alamouti min det product: {mn:.4g}")
for m in (0, 1):
    cb = golden(q4, m=m)
    mn4, _ = verify_nvd(cb, q4.difference_points())
    mn16, _ = verify_nvd(cb, q16.difference_points(max_coord=4))
    print(f"  golden m={m}: 4-QAM minimum {mn4:.4g}, boxed 16-QAM minimum {mn16:.4g}"
          f"  (identical: constellation growth does not shrink it)")
print()

print("coded error rate of the parallel golden code over (2,2,2) flip-and-forward:")
ff = default_ff_scheme((2, 2, 2))
pts = simulate_ser((2, 2, 2), ff, golden(q4, m=1), [10.0, 14.0, 18.0], 40_000, seed=13)
for p in pts:
    print(f"  {p.snr_db:>5.1f} dB: ser {p.p_hat:.5f}")
print()

print("the orthogonal design rides a reduced (2,1,2,2) channel:")
pts = simulate_ser((2, 1, 2, 2), AfScheme(), alamouti(q4), [10.0, 16.0, 22.0], 40_000, seed=13)
for p in pts:
    print(f"  {p.snr_db:>5.1f} dB: ser {p.p_hat:.5f}")
print()

print("codebooks export their construction for reproducibility:")
print(codebook_to_json(golden(q4, m=1)))
