/* tslint:disable */
/* eslint-disable */

/**
 * Encode a symbol string, modulate it, invert the level of each listed cell
 * (comma separated, -1 is the cell before the first symbol) and decode
 * what comes out.
 */
export function nrzi_explorer(symbols: string, cells: string): string;

/**
 * Every row of the rate summary for one ring.
 */
export function rates(links: number, ber: number, frame_octets: number): string;

/**
 * Frames around a ring with noise on every link; tallies with 95% Wilson
 * intervals next to the closed-form frame error probability.
 */
export function simulate_frames(links: number, ber: number, frame_octets: number, trials: number, seed: number, baseline: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly nrzi_explorer: (a: number, b: number, c: number, d: number) => [number, number];
    readonly rates: (a: number, b: number, c: number) => [number, number];
    readonly simulate_frames: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
