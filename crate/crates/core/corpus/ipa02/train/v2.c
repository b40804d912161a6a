int main() {
    int a, b, menor, maior;
    scanf("%d%d", &a, &b);
    menor = a;
    maior = b;
    if (b < a) {
        menor = b;
        maior = a;
    }
    printf("%d\n", menor);
    printf("%d\n", maior);
    return 0;
}
