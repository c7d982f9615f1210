/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_treedemo_free: (a: number, b: number) => void;
export const kochSvg: (a: number) => [number, number, number, number];
export const rewriteGrammar: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const treedemo_log: (a: number) => [number, number];
export const treedemo_new: (a: number) => number;
export const treedemo_press: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const treedemo_setThreshold: (a: number, b: number) => void;
export const treedemo_status: (a: number) => [number, number];
export const treedemo_svg: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
