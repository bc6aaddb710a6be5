/* tslint:disable */
/* eslint-disable */

/**
 * 1-D Burgers from the same data with `alpha` and with `alpha = 2`.
 *
 * Runs ETD with `steps` steps on the common horizon `min(T_alpha, T_2)`.
 * Layout: `[horizon, gap_hs, x.., u_alpha.., u_2..]` with `modes` samples each.
 */
export function burgers_compare(alpha: number, hs_norm: number, modes: number, steps: number, seed: bigint): Float64Array;

/**
 * Existence times for one component with `|u_0|_{H^s} = data_norm`.
 *
 * `alpha` runs over `count` evenly spaced points of `[2 - delta, 2 + delta]`
 * (`alpha = 2` included). Layout: `[t_2, t_0, alpha.., t_alpha..]`.
 */
export function existence_times(data_norm: number, constant: number, delta: number, beta: number, count: number): Float64Array;

/**
 * Weighted kernel gaps at `t = 0` and `n_times` geometric times up to `horizon`.
 *
 * Layout: `[t.., plain.., gradient..]`, `3 (n_times + 1)` values.
 */
export function kernel_gap_curve(alpha: number, delta: number, horizon: number, n_times: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly burgers_compare: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly existence_times: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly kernel_gap_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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
