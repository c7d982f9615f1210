/* tslint:disable */
/* eslint-disable */

/**
 * One account tree driven by the `P F C S L V R` keys.
 */
export class TreeDemo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The event log, one JSON record per line.
     */
    log(): string;
    constructor(seed: number);
    press(key: string, now_ms: number): string;
    setThreshold(threshold: number): void;
    status(): string;
    svg(): string;
}

export function kochSvg(n: number): string;

export function rewriteGrammar(grammar: string, iterations: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_treedemo_free: (a: number, b: number) => void;
    readonly kochSvg: (a: number) => [number, number, number, number];
    readonly rewriteGrammar: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly treedemo_log: (a: number) => [number, number];
    readonly treedemo_new: (a: number) => number;
    readonly treedemo_press: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly treedemo_setThreshold: (a: number, b: number) => void;
    readonly treedemo_status: (a: number) => [number, number];
    readonly treedemo_svg: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
