"""Bit budget of one DVB-S2 codeword for the four 9 bit/4D systems."""

from pasim.simulate import TABLE1, table1_system

for name in TABLE1:
    system = table1_system(name)
    lay = system.layout
    print(f"{name:10s} c={lay.fec_rate}  n={lay.dm_blocklength:4d}  k={lay.dm_input_bits:4d}  "
          f"blocks={lay.dm_blocks_per_codeword:5d}  sign info={lay.uniform_sign_info_bits:5d}  "
          f"parity={lay.parity_bits:5d}  source={lay.source_bits_per_codeword}  "
          f"net={float(system.net_rate):.3f} bit/4D")

lay = table1_system("ess-200").layout
print(f"\n{lay.symbols_per_codeword} 64-QAM symbols per codeword, {20 * lay.symbols_per_codeword} per 20 codewords")
