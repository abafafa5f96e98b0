/* tslint:disable */
/* eslint-disable */

/**
 * Received-power map for one design at one temperature.
 */
export class PowerMap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[x0, x1, y0, y1]` of the eavesdropper area.
     */
    eve_box(): Float64Array;
    /**
     * `[x_min, x_max, y_min, y_max]` in meters.
     */
    extent(): Float64Array;
    nx(): number;
    ny(): number;
    omega_max(): number;
    phases(): Float64Array;
    /**
     * Row-major over x then y, in dB.
     */
    power_db(): Float64Array;
    secrecy_rate_bits(): number;
    /**
     * `[x0, x1, y0, y1]` of the user area.
     */
    user_box(): Float64Array;
}

/**
 * Phase budget in radians at each temperature in `temps_c`.
 */
export function lc_curve(beta: number, clearing_c: number, reference_c: number, temps_c: Float64Array): Float64Array;

/**
 * Mean of `e^{jω}` for `ω` uniform on `[0, ω_max]`, as `[re, im]`.
 */
export function phasor_mean(omega_max: number): Float64Array;

/**
 * Designs the demo surface (`optimized` or `neglect`) at `temperature_c`
 * and maps the received power on the `z = −5 m` plane.
 */
export function power_map(design: string, temperature_c: number, vertical: boolean, step_m: number): PowerMap;

/**
 * Samples of `ω ∈ [0, 2π)`: triples `(ω, lhs, inside)` where `lhs` is the
 * linear range-test value and `inside` is 1 when `lhs ≤ 1`.
 */
export function range_arc(omega_max: number, samples: number): Float64Array;

/**
 * `"full"`, `"constrained"` or `"unsupported"`.
 */
export function range_regime(omega_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_powermap_free: (a: number, b: number) => void;
    readonly lc_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly phasor_mean: (a: number) => [number, number];
    readonly power_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly powermap_eve_box: (a: number) => [number, number];
    readonly powermap_extent: (a: number) => [number, number];
    readonly powermap_nx: (a: number) => number;
    readonly powermap_ny: (a: number) => number;
    readonly powermap_omega_max: (a: number) => number;
    readonly powermap_phases: (a: number) => [number, number];
    readonly powermap_power_db: (a: number) => [number, number];
    readonly powermap_secrecy_rate_bits: (a: number) => number;
    readonly powermap_user_box: (a: number) => [number, number];
    readonly range_arc: (a: number, b: number) => [number, number];
    readonly range_regime: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
