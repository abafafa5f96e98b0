/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_powermap_free: (a: number, b: number) => void;
export const lc_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const phasor_mean: (a: number) => [number, number];
export const power_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const powermap_eve_box: (a: number) => [number, number];
export const powermap_extent: (a: number) => [number, number];
export const powermap_nx: (a: number) => number;
export const powermap_ny: (a: number) => number;
export const powermap_omega_max: (a: number) => number;
export const powermap_phases: (a: number) => [number, number];
export const powermap_power_db: (a: number) => [number, number];
export const powermap_secrecy_rate_bits: (a: number) => number;
export const powermap_user_box: (a: number) => [number, number];
export const range_arc: (a: number, b: number) => [number, number];
export const range_regime: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
