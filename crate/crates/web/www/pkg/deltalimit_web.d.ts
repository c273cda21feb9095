/* tslint:disable */
/* eslint-disable */

/**
 * `[x, Re G_scaled, Im G_scaled, Re G_limit, Im G_limit]` rows at fixed `y` for
 * the square well along `lambda = theta / eps^2 + omega / eps`. The limit
 * kernel is Robin when `theta` is resonant and Dirichlet otherwise.
 */
export function kernel_slice(theta: number, omega: number, eps: number, y: number, z_re: number, z_im: number, x_max: number, n: number): Float64Array;

/**
 * Name of the limit operator for the square well at `(theta, omega)`.
 */
export function limit_label(theta: number, omega: number): string;

/**
 * `[x, psi_xi(x), psi_0(x)]` rows on `[0, 1]` for the linear family.
 */
export function psi_profiles(xi: number, theta: number, n: number): Float64Array;

/**
 * `[theta, psi'_theta(1)]` rows on `[lo, hi]`; the zeros are the resonant couplings.
 */
export function resonance_curve(xi: number, lo: number, hi: number, n: number): Float64Array;

/**
 * `[theta, alpha / omega]` for each resonance of the linear family in `[lo, hi]`.
 */
export function resonances(xi: number, lo: number, hi: number, max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly kernel_slice: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly limit_label: (a: number, b: number) => [number, number, number, number];
    readonly psi_profiles: (a: number, b: number, c: number) => [number, number, number, number];
    readonly resonance_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly resonances: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
